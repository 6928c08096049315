"""Cranfield-style construction of judged lists from ideal resources.

Each ideal record's title is issued as a query. The ideal sits at the top with
label 2, retrieved results follow with label 1, and one known-bad resource
sampled from the pool closes the list with label 0.
"""

from __future__ import annotations

import csv
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..errors import ClientError, ConfigError, EmptyCorpus, ParseError
from ..model import JudgedList, Resource, validate_list
from .search import SearchClient, SearchResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdealRecord:
    title: str
    url: str
    snippet: str
    grade: float | None = None


@dataclass(frozen=True)
class BadRecord:
    url: str
    title: str
    snippet: str


@dataclass(frozen=True)
class RanksetSpec:
    ideal_corpus: str | Path
    bad_pool: str | Path
    max_results: int = 20
    seed: int = 0


def _read_csv(path: str | Path, required: tuple[str, ...]) -> list[dict[str, str]]:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"file not found: {path}") from exc
    with fh:
        reader = csv.DictReader(fh)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ParseError(f"{path}: missing columns {missing}", 1)
        return list(reader)


def read_ideal_corpus(path: str | Path) -> list[IdealRecord]:
    out = []
    for lineno, rec in enumerate(_read_csv(path, ("title", "url", "snippet")), 2):
        grade = (rec.get("grade") or "").strip()
        try:
            out.append(IdealRecord(rec["title"], rec["url"], rec["snippet"], float(grade) if grade else None))
        except ValueError as exc:
            raise ParseError(f"{path}: bad grade {grade!r}", lineno) from exc
    return out


def read_bad_pool(path: str | Path) -> list[BadRecord]:
    return [BadRecord(r["url"], r.get("title", ""), r["snippet"]) for r in _read_csv(path, ("url", "snippet"))]


def _assemble(
    qid: str, ideal: IdealRecord, results: list[SearchResult], bad: BadRecord
) -> tuple[JudgedList | None, str]:
    if not results:
        return None, "no results"
    if not ideal.snippet.strip():
        return None, "ideal resource has no content"
    ideal_rank = None
    seen = {ideal.url, bad.url}
    kept = []
    for r in sorted(results, key=lambda r: r.rank):
        if r.url == ideal.url and ideal_rank is None:
            ideal_rank = r.rank
        if r.url in seen or not r.snippet.strip():
            continue
        seen.add(r.url)
        kept.append(r)
    if not kept:
        return None, "no retrieved resources with content"
    last = max(r.rank for r in results)
    resources = [
        Resource(ideal.url, ideal.title, ideal.snippet, ideal_rank or last + 1, label=2, is_ideal=True),
        *(Resource(r.url, r.title, r.snippet, r.rank, label=1) for r in kept),
        Resource(bad.url, bad.title, bad.snippet, last + 2, label=0, is_known_bad=True),
    ]
    return validate_list(JudgedList(qid, ideal.title, tuple(resources))), ""


def build_rankset(
    spec: RanksetSpec,
    client: SearchClient,
    dropped: list[tuple[str, str]] | None = None,
    n_jobs: int = 1,
) -> list[JudgedList]:
    """Build one judged list per usable ideal record, ordered by query id.

    Queries without results, or whose results all lack content, are dropped,
    logged, and appended to ``dropped`` as ``(query_id, reason)``.
    """
    corpus = read_ideal_corpus(spec.ideal_corpus)
    pool = read_bad_pool(spec.bad_pool)
    if not corpus:
        raise EmptyCorpus(f"ideal corpus {spec.ideal_corpus} is empty")
    if not pool:
        raise EmptyCorpus(f"bad pool {spec.bad_pool} is empty")
    width = max(5, len(str(len(corpus))))
    qids = [f"q{i:0{width}d}" for i in range(1, len(corpus) + 1)]
    # sample bad resources up front so assignments never depend on which queries drop
    rng = random.Random(spec.seed)
    bads = [pool[rng.randrange(len(pool))] for _ in corpus]

    def fetch(i: int) -> list[SearchResult]:
        try:
            return client.search(corpus[i].title)[: spec.max_results]
        except ClientError as exc:
            if exc.query_id is None:
                raise ClientError(str(exc), qids[i]) from exc
            raise

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            fetched = list(ex.map(fetch, range(len(corpus))))
    else:
        fetched = [fetch(i) for i in range(len(corpus))]

    lists = []
    for qid, ideal, results, bad in zip(qids, corpus, fetched, bads):
        judged, reason = _assemble(qid, ideal, results, bad)
        if judged is None:
            logger.warning("dropped %s (%r): %s", qid, ideal.title, reason)
            if dropped is not None:
                dropped.append((qid, reason))
            continue
        lists.append(judged)
    return sorted(lists, key=lambda j: j.query_id)
