from __future__ import annotations

import csv
import random
from pathlib import Path

import pytest

from redorank.dataset import SearchResult, write_fixture
from redorank.model import JudgedList, Resource

CLEAN_WORDS = "the plant needs water and light to grow in the garden science lesson about cells energy sun".split()
BAD_WORDS = "gun knife bomb kill drugs gamble casino crack porn".split()


def make_list(qid: str = "q1", n_retrieved: int = 2, bad: bool = True) -> JudgedList:
    res = [Resource("http://ideal/1", "Ideal", "Plants need water.", 1, label=2, is_ideal=True)]
    res += [Resource(f"http://r/{i}", f"R{i}", f"Snippet number {i}.", i + 1, label=1) for i in range(1, n_retrieved + 1)]
    if bad:
        res.append(Resource("http://bad/1", "Bad", "guns and knives", n_retrieved + 2, label=0, is_known_bad=True))
    return JudgedList(qid, "plants", tuple(res))


def build_corpus(root: Path, n_queries: int = 12, n_results: int = 5, empty_for: tuple[int, ...] = (), seed: int = 0) -> Path:
    """Ideal corpus, bad pool, fixture dir and config under ``root``; returns the config path."""
    rng = random.Random(seed)

    def snip(pool, n=12):
        return " ".join(rng.choice(pool) for _ in range(n)) + "."

    fx = root / "fx"
    fx.mkdir(parents=True, exist_ok=True)
    with open(root / "ideal.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["title", "url", "snippet", "grade"])
        for i in range(n_queries):
            title = f"topic {i} plants"
            w.writerow([title, f"http://ideal/{i}", snip(CLEAN_WORDS), "4"])
            results = [] if i in empty_for else [
                SearchResult(f"http://r/{i}/{j}", f"t{j}", snip(CLEAN_WORDS + BAD_WORDS[:2]), j)
                for j in range(1, n_results + 1)
            ]
            write_fixture(fx, title, results)
    with open(root / "bad.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["url", "title", "snippet"])
        for i in range(4):
            w.writerow([f"http://bad/{i}", "b", snip(BAD_WORDS)])
    with open(root / "judge.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["snippet", "class"])
        for _ in range(80):
            w.writerow([snip(BAD_WORDS), "bad"])
            w.writerow([snip(CLEAN_WORDS), "ok"])
    cfg = root / "cfg.toml"
    cfg.write_text(
        '[search]\nkind = "fixture"\nfixture_dir = "fx"\n\n'
        '[rankset]\nideal_corpus = "ideal.csv"\nbad_pool = "bad.csv"\nseed = 3\n\n'
        "[judge]\nn_trees = 10\n"
    )
    return cfg


@pytest.fixture
def corpus(tmp_path: Path) -> Path:
    return build_corpus(tmp_path)
