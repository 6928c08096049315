"""Ranking measures: DCG/NDCG@k, cost-sensitive DCG and its normalized form, MRR, MRR_Bad.

Positions are 1-based with discount ``log2(i + 1)``. Cost-sensitive DCG
subtracts each examined document's cost from its discounted gain:

    CS-DCG@k = sum_{i<=k} (g_i / log2(i + 1) - c_i)

The normalized form divides by the CS-DCG of the ideal ordering (gain
descending, cost ascending). When that ideal is not positive the score is
shifted instead (``cs - ideal``), and the result is clamped to [-1, 1].

Scalar functions take one ranked list. ``Measure`` evaluates a whole batch of
padded lists at once for the boosting loop.
"""

from __future__ import annotations

import itertools
import math
import re
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from scipy import stats

from .errors import ListTooLong

BRUTEFORCE_MAX = 10


def discount(n: int) -> np.ndarray:
    return np.log2(np.arange(2, n + 2, dtype=np.float64))


def dcg_at_k(gains: Sequence[float], k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    g = np.asarray(gains, dtype=np.float64)[:k]
    return float(np.sum(g / discount(len(g))))


def ndcg_at_k(gains: Sequence[float], k: int) -> float:
    """DCG over the DCG of the gain-sorted list; 0 when no document has gain."""
    ideal = dcg_at_k(sorted(gains, reverse=True), k)
    return dcg_at_k(gains, k) / ideal if ideal > 0 else 0.0


@dataclass(frozen=True)
class RankedEval:
    """Gains and costs in ranked order, with cutoff ``k``."""

    gains: tuple[float, ...]
    costs: tuple[float, ...]
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        object.__setattr__(self, "costs", tuple(float(c) for c in self.costs))
        if len(self.gains) != len(self.costs):
            raise ValueError("gains and costs differ in length")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if any(not 0.0 <= c <= 1.0 for c in self.costs):
            raise ValueError("costs must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.gains)

    def permuted(self, order: Sequence[int]) -> "RankedEval":
        return RankedEval(tuple(self.gains[i] for i in order), tuple(self.costs[i] for i in order), self.k)


def cs_dcg_at_k(ev: RankedEval) -> float:
    m = min(ev.k, len(ev))
    g = np.asarray(ev.gains[:m])
    c = np.asarray(ev.costs[:m])
    return float(np.sum(g / discount(m) - c))


def ideal_order(ev: RankedEval) -> list[int]:
    """Indices sorted by gain descending, then cost ascending, then original position."""
    return sorted(range(len(ev)), key=lambda i: (-ev.gains[i], ev.costs[i], i))


def ideal_cs_dcg(ev: RankedEval) -> float:
    return cs_dcg_at_k(ev.permuted(ideal_order(ev)))


def _normalize_cs(cs: float | np.ndarray, ideal: float | np.ndarray):
    ideal = np.asarray(ideal, dtype=np.float64)
    cs = np.asarray(cs, dtype=np.float64)
    positive = ideal > 0
    safe = np.where(positive, ideal, 1.0)
    out = np.where(positive, cs / safe, cs - ideal)
    return np.clip(out, -1.0, 1.0)


def ncs_dcg_at_k(ev: RankedEval) -> float:
    if len(ev) == 0:
        raise ValueError("normalized CS-DCG needs a non-empty list")
    return float(_normalize_cs(cs_dcg_at_k(ev), ideal_cs_dcg(ev)))


@lru_cache(maxsize=None)
def _permutations(n: int, m: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n), m)), dtype=np.int8).reshape(-1, m)


def _permutation_chunks(n: int, m: int, size: int = 200_000) -> Iterator[np.ndarray]:
    it = itertools.permutations(range(n), m)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield np.array(block, dtype=np.int8)


def ideal_cs_dcg_bruteforce(ev: RankedEval) -> float:
    """Exact maximum CS-DCG over every ordered choice of the top ``min(k, n)`` documents."""
    n = len(ev)
    if n > BRUTEFORCE_MAX:
        raise ListTooLong(f"brute force limited to {BRUTEFORCE_MAX} documents, got {n}")
    if n == 0:
        return 0.0
    m = min(ev.k, n)
    g = np.asarray(ev.gains)
    c = np.asarray(ev.costs)
    inv_d = 1.0 / discount(m)
    best = -math.inf
    chunks = [_permutations(n, m)] if n <= 8 else _permutation_chunks(n, m)
    for perms in chunks:
        values = g[perms] @ inv_d - c[perms].sum(axis=1)
        best = max(best, float(values.max()))
    return best


def reciprocal_rank(flags: Sequence[bool]) -> float:
    for i, hit in enumerate(flags, 1):
        if hit:
            return 1.0 / i
    return 0.0


def mrr(rankings: Sequence[Sequence[int]], relevant_label: int = 2) -> float:
    """Mean over lists of 1/rank of the first document labelled ``>= relevant_label``."""
    if not rankings:
        raise ValueError("mrr needs at least one list")
    return float(np.mean([reciprocal_rank([lab >= relevant_label for lab in r]) for r in rankings]))


def mrr_bad(rankings: Sequence[Sequence[bool]]) -> float:
    """Mean over lists of 1/rank of the first known-bad document (lower is better)."""
    if not rankings:
        raise ValueError("mrr_bad needs at least one list")
    return float(np.mean([reciprocal_rank(r) for r in rankings]))


def ttest_pvalue(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided two-sample Student t-test p-value; 1.0 when both samples are constant and equal."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        return float("nan")
    if np.ptp(a) == 0 and np.ptp(b) == 0:
        return 1.0 if a[0] == b[0] else 0.0
    with warnings.catch_warnings():
        # scipy warns on near-identical samples; the p-value is still usable
        warnings.simplefilter("ignore", RuntimeWarning)
        return float(stats.ttest_ind(a, b).pvalue)


_MEASURE = re.compile(r"^(ndcg|ncs_dcg)(?:@(\d+|all))?$")


@dataclass(frozen=True)
class Measure:
    """Listwise measure over padded batches; ``k=None`` examines each whole list."""

    name: str
    k: int | None = 10

    def __post_init__(self) -> None:
        if self.name not in ("ndcg", "ncs_dcg"):
            raise ValueError(f"unknown measure {self.name!r}")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "Measure":
        m = _MEASURE.match(text.strip().lower().replace("-", "_"))
        if not m:
            raise ValueError(f"cannot parse measure {text!r}; expected ndcg@K or ncs_dcg@K")
        k = m.group(2)
        return cls(m.group(1), None if k == "all" else int(k) if k else 10)

    @property
    def id(self) -> str:
        return f"{self.name}@{'all' if self.k is None else self.k}"

    def evaluate(self, gains: Sequence[float], costs: Sequence[float]) -> float:
        k = len(gains) if self.k is None else self.k
        if self.name == "ndcg":
            return ndcg_at_k(gains, k)
        return ncs_dcg_at_k(RankedEval(tuple(gains), tuple(costs), k))

    def _cut(self, shape: tuple[int, int], lengths: np.ndarray) -> np.ndarray:
        pos = np.arange(shape[1])[None, :]
        limit = lengths if self.k is None else np.minimum(lengths, self.k)
        return pos < limit[:, None]

    def _raw(self, gains: np.ndarray, costs: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        cut = self._cut(gains.shape, lengths)
        inv_d = 1.0 / discount(gains.shape[1])
        g = np.where(cut, gains, 0.0) * inv_d
        if self.name == "ndcg":
            return g.sum(axis=1)
        return (g - np.where(cut, costs, 0.0)).sum(axis=1)

    def ideal(self, gains: np.ndarray, costs: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """Per-row value of the ideal ordering; invalid slots must hold gain ``-inf``."""
        order = np.lexsort((costs, -gains), axis=1)
        g = np.take_along_axis(gains, order, axis=1)
        c = np.take_along_axis(costs, order, axis=1)
        return self._raw(np.where(np.isfinite(g), g, 0.0), c, lengths)

    def batch(self, gains: np.ndarray, costs: np.ndarray, lengths: np.ndarray, ideal: np.ndarray) -> np.ndarray:
        """Scores for rows already in ranked order (valid slots first)."""
        raw = self._raw(gains, costs, lengths)
        if self.name == "ndcg":
            positive = ideal > 0
            return np.where(positive, raw / np.where(positive, ideal, 1.0), 0.0)
        return _normalize_cs(raw, ideal)
