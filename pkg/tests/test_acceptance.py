"""Acceptance criteria. Each test prints one PASS/FAIL line with its measured values."""

from __future__ import annotations

import math
import random
import time
from pathlib import Path

import numpy as np
import pytest

from redorank.adarank import TrainConfig, train
from redorank.cli import main
from redorank.dataset import (
    FixtureClient,
    RanksetSpec,
    build_rankset,
    dumps_dataset,
    dumps_features,
    loads_dataset,
    loads_features,
)
from redorank.errors import EmptyText
from redorank.evaluation import ABLATIONS, run_ablation
from redorank.metrics import RankedEval, cs_dcg_at_k, dcg_at_k, ideal_cs_dcg, ideal_cs_dcg_bruteforce, ttest_pvalue
from redorank.model import FEATURE_SCHEMA
from redorank.objectionability import (
    CATEGORIES,
    ForestParams,
    TermLists,
    default_term_lists,
    extract_obj_features,
    misspelling_coverage,
    misspelling_prevalence,
    term_coverage,
    term_prevalence,
    train_forest,
)
from redorank.objectionability.forest import forest_to_json
from redorank.scorers import mixer, s_read
from redorank.synthetic import label_copy_queries, planted_bad_queries
from redorank.textproc import SpellDictionary, TermSequence, default_text_config

from conftest import BAD_WORDS, CLEAN_WORDS, build_corpus


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_metric_oracle(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_dcg = 0.0
    uniform_match = 0
    nonuniform_mismatch = 0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, 11))
        gains = rng.choice([0.0, 1.0, 3.0], size=n)
        costs = rng.uniform(0, 1, size=n)
        ev0 = RankedEval(tuple(gains), (0.0,) * n, k)
        worst_dcg = max(worst_dcg, abs(cs_dcg_at_k(ev0) - dcg_at_k(gains.tolist(), k)))
        uni = RankedEval(tuple(gains), (float(costs[0]),) * n, k)
        uniform_match += abs(ideal_cs_dcg(uni) - ideal_cs_dcg_bruteforce(uni)) <= 1e-12
        mixed = RankedEval(tuple(gains), tuple(costs), k)
        nonuniform_mismatch += ideal_cs_dcg_bruteforce(mixed) - ideal_cs_dcg(mixed) > 1e-12
    elapsed = time.perf_counter() - t0
    ok = worst_dcg <= 1e-12 and uniform_match == 1000 and elapsed < 10
    report(
        1, ok,
        f"max |cs_dcg(c=0) - dcg| = {worst_dcg:.2e}; uniform-cost ideal matches {uniform_match}/1000; "
        f"non-uniform heuristic gaps {nonuniform_mismatch}/1000 (informational); {elapsed:.2f}s < 10s",
    )


def test_criterion_2_goldens(report):
    checks = {}
    checks["cs_dcg([3,1,0],[0,0,1],3)=2.6309"] = abs(cs_dcg_at_k(RankedEval((3, 1, 0), (0, 0, 1), 3)) - 2.6309) <= 1e-4
    checks["mixer(1,1)=log2(13)"] = abs(mixer(1, 1) - math.log2(13)) <= 1e-6
    seq = lambda *t: TermSequence(tuple(t))
    checks["tp=0.5"] = term_prevalence(seq("gun", "fun", "gun", "run"), {"gun", "knife"}) == 0.5
    checks["tcov=2/3"] = abs(term_coverage(seq("gun", "bomb"), {"gun", "knife", "bomb"}) - 2 / 3) <= 1e-12
    d = SpellDictionary.from_words(["cat", "dog", "gun", "knife", "bomb"])
    checks["mp=0.5"] = misspelling_prevalence(seq("teh", "cat", "dgo", "dog"), d) == 0.5
    mapping = {c: {f"zz{c.lower()}"} for c in CATEGORIES}
    mapping["Pornography"] = {"pr0n"}
    tl = TermLists.from_mapping(mapping)
    checks["mc=1.0"] = misspelling_coverage(seq("pr0n", "cat"), tl, d) == 1.0
    checks["mc=0.5"] = misspelling_coverage(seq("teh", "pr0n"), tl, d) == 0.5
    mapping["Violence"] = {"gun", "knife", "bomb"}
    text = default_text_config()
    f = extract_obj_features("gun gun knife teh", TermLists.from_mapping(mapping), text.stopwords, text.lemma_rules, d).named()
    checks["crafted snippet"] = (
        f["tp_Violence"] == 0.75 and abs(f["tcov_Violence"] - 2 / 3) <= 1e-12 and f["mp"] == 0.25 and f["mc"] == 0.0
    )
    failed = [k for k, v in checks.items() if not v]
    report(2, not failed, f"{len(checks) - len(failed)}/{len(checks)} goldens exact" + (f"; failed {failed}" if failed else ""))


def test_criterion_3_boosting(report):
    t0 = time.perf_counter()
    first_hits = 0
    worst = 1.0
    for seed in range(20):
        queries, schema = label_copy_queries(200, seed=seed)
        model = train(queries, TrainConfig(max_rounds=50, measure="ndcg@10"), schema)
        first_hits += model.training_log[0].feature == "signal" and model.training_log[0].alpha > 0
        worst = min(worst, model.training_log[-1].train_measure)
    elapsed = time.perf_counter() - t0
    ok = worst >= 0.99 and first_hits >= 19 and elapsed < 60
    report(3, ok, f"label-copy chosen first {first_hits}/20; min train NDCG@10 {worst:.4f} >= 0.99; {elapsed:.2f}s < 60s")


def test_criterion_4_cost_sensitivity(report):
    ndcg_model = next(v for v in ABLATIONS if v.row == 1)
    cost_model = next(v for v in ABLATIONS if v.row == 10)
    base, ours = [], []
    for seed in range(20):
        queries = {rows[0].query_id: rows for rows in planted_bad_queries(200, seed=seed)}
        a, b = run_ablation(queries, FEATURE_SCHEMA, seed=seed, variants=(ndcg_model, cost_model))
        base.append(a.summary)
        ours.append(b.summary)
    bad_a = np.array([s["mrr_bad"] for s in base])
    bad_b = np.array([s["mrr_bad"] for s in ours])
    nd_a = np.mean([s["ndcg@10"] for s in base])
    nd_b = np.mean([s["ndcg@10"] for s in ours])
    p = ttest_pvalue(bad_b, bad_a)
    ok = bad_b.mean() < bad_a.mean() and abs(nd_a - nd_b) <= 0.02 and p < 0.05
    report(
        4, ok,
        f"MRR_Bad nCS-DCG {bad_b.mean():.4f} < NDCG {bad_a.mean():.4f} (p={p:.2e}); "
        f"NDCG@10 {nd_b:.4f} vs {nd_a:.4f} (gap {abs(nd_a - nd_b):.4f} <= 0.02)",
    )


def test_criterion_5_forest(report):
    rng = np.random.default_rng(11)
    X = rng.uniform(0, 1, size=(500, 16)) * (rng.uniform(size=(500, 16)) < 0.4)
    y = (X[:, CATEGORIES.index("Pornography")] > 0.3).astype(int)
    params = ForestParams(max_depth=8, max_leaf_nodes=32, min_samples_leaf=32, min_samples_split=32)
    forest = train_forest(X, y, params, seed=5)
    acc = float((forest.predict(X) == y).mean())
    probe = rng.uniform(0, 1, size=(2000, 16))
    p = forest.predict_proba(np.vstack([X, probe]))
    in_range = bool(((p >= 0) & (p <= 1)).all())
    same = forest_to_json(forest) == forest_to_json(train_forest(X, y, params, seed=5))
    ok = acc >= 0.95 and in_range and same
    report(5, ok, f"train accuracy {acc:.4f} >= 0.95; s_bad in [0,1]: {in_range}; bit-reproducible: {same}")


def test_criterion_6_dataset(report, tmp_path):
    cfg = build_corpus(tmp_path, n_queries=30, n_results=6, empty_for=(3, 17))
    spec = RanksetSpec(tmp_path / "ideal.csv", tmp_path / "bad.csv", seed=2)
    dropped: list = []
    lists = build_rankset(spec, FixtureClient(tmp_path / "fx"), dropped)
    shape = all(j.labels()[0] == 2 and j.labels()[-1] == 0 and j.labels().count(2) == 1 and j.labels().count(0) == 1
                for j in lists)
    trip = loads_dataset(dumps_dataset(lists)) == lists
    rows = [r for q in planted_bad_queries(20, seed=0) for r in q]
    ftable = loads_features(dumps_features(rows, FEATURE_SCHEMA))
    ftrip = list(ftable.rows) == rows
    drop_ok = sorted(q for q, _ in dropped) == ["q00004", "q00018"] and len(lists) == 28
    ok = shape and trip and ftrip and drop_ok
    report(
        6, ok,
        f"{len(lists)} lists, label-2 first & label-0 last in all: {shape}; dataset round-trip {trip}; "
        f"feature round-trip {ftrip}; empty-result queries dropped {[q for q, _ in dropped]}",
    )


def _pipeline_artifacts(root: Path) -> dict[str, bytes]:
    cfg = build_corpus(root, n_queries=14, empty_for=(5,))
    steps = [
        ("build-dataset", "--config", cfg, "--out", root / "ds.jsonl", "--seed", 9),
        ("train-judge", "--config", cfg, "--data", root / "judge.csv", "--snippets", "--seed", 9, "--out", root / "judge.json"),
        ("extract-features", "--config", cfg, "--dataset", root / "ds.jsonl", "--judge-model", root / "judge.json",
         "--force-bad-cost", "--out", root / "f.txt"),
        ("train-ranker", "--feature-file", root / "f.txt", "--seed", 9, "--out", root / "m.json"),
        ("rerank", "--model", root / "m.json", "--dataset", root / "ds.jsonl", "--feature-file", root / "f.txt",
         "--out", root / "rr.jsonl"),
        ("eval", "--feature-file", root / "f.txt", "--model", root / "m.json", "--out", root / "ev.csv",
         "--per-query", root / "pq.csv"),
        ("ablate", "--feature-file", root / "f.txt", "--seed", 9, "--max-rounds", 40, "--out", root / "ab.csv"),
    ]
    for step in steps:
        assert main([str(a) for a in step]) == 0, step[0]
    names = ("ds.jsonl", "judge.json", "f.txt", "m.json", "rr.jsonl", "ev.csv", "pq.csv", "ab.csv")
    return {n: (root / n).read_bytes() for n in names}


def test_criterion_7_determinism(report, tmp_path):
    a = _pipeline_artifacts(tmp_path / "run1")
    b = _pipeline_artifacts(tmp_path / "run2")
    differing = [n for n in a if a[n] != b[n]]
    report(7, not differing, f"{len(a) - len(differing)}/{len(a)} stage artifacts byte-identical across two runs"
           + (f"; differing {differing}" if differing else ""))


def test_criterion_8_fuzz(report):
    text = default_text_config()
    tl = default_term_lists().lemmatized(text.lemma_rules)
    rnd = random.Random(8)
    vocab = CLEAN_WORDS + BAD_WORDS + sorted(tl.all_terms) + ["teh", "qzx", "pr0n", "1999", "x", "naïve", "日本語", "Ω"]
    punct = [".", "!", "?", ",", "...", "\u2014", "-", "'", '"', "(", ")", " ", "\n", "\t"]
    bad_feats = bad_read = bad_mix = crashes = empty = 0
    for _ in range(10_000):
        n = rnd.randint(0, 60)
        parts = []
        for _ in range(n):
            r = rnd.random()
            if r < 0.7:
                w = rnd.choice(vocab)
                parts.append(w.upper() if rnd.random() < 0.1 else w)
            elif r < 0.9:
                parts.append(rnd.choice(punct))
            else:
                parts.append("".join(chr(rnd.randint(33, 0x2FFF)) for _ in range(rnd.randint(1, 6))))
        snippet = " ".join(parts) if rnd.random() < 0.8 else "".join(parts)
        try:
            vec = extract_obj_features(snippet, tl, text.stopwords, text.lemma_rules, text.dictionary).as_vector()
            bad_feats += not (len(vec) == 16 and all(0.0 <= v <= 1.0 for v in vec))
            try:
                g = s_read(snippet)
            except EmptyText:
                empty += 1
                continue
            bad_read += not 0.0 <= g <= 13.0
            for e in (0.0, rnd.random(), 1.0):
                bad_mix += not math.isfinite(mixer(g, e))
        except Exception:  # noqa: BLE001 - counting unexpected failures is the point
            crashes += 1
    ok = not (bad_feats or bad_read or bad_mix or crashes)
    report(
        8, ok,
        f"10000 snippets: features out of [0,1] {bad_feats}, s_read out of [0,13] {bad_read}, "
        f"non-finite mixer {bad_mix}, unexpected exceptions {crashes} (word-less snippets rejected as EmptyText: {empty})",
    )
