"""Seeded synthetic judged lists for exercising the ranker without real search data."""

from __future__ import annotations

import numpy as np

from .model import FEATURE_SCHEMA, LtrRow
from .scorers.mixer import mixer


def label_copy_queries(
    n_queries: int = 200,
    seed: int = 0,
    n_noise: int = 3,
    noise: float = 0.01,
    list_len: tuple[int, int] = (8, 20),
) -> tuple[list[list[LtrRow]], tuple[str, ...]]:
    """Lists where one feature equals the label plus N(0, noise) and the rest are uniform noise.

    The label-copy column ``signal`` sits at a seeded random position in the schema.
    """
    rng = np.random.default_rng(seed)
    schema = [f"noise{i}" for i in range(n_noise)]
    signal_at = int(rng.integers(0, n_noise + 1))
    schema.insert(signal_at, "signal")
    queries = []
    for q in range(n_queries):
        n = int(rng.integers(list_len[0], list_len[1] + 1))
        labels = rng.integers(0, 3, size=n)
        while len(set(labels.tolist())) == 1:
            labels = rng.integers(0, 3, size=n)
        noise_cols = rng.uniform(0.0, 1.0, size=(n, n_noise))
        signal = labels + rng.normal(0.0, noise, size=n)
        X = np.insert(noise_cols, signal_at, signal, axis=1)
        queries.append(
            [LtrRow(f"q{q:04d}", f"q{q:04d}-d{i:02d}", int(labels[i]), tuple(X[i]), 0.0) for i in range(n)]
        )
    return queries, tuple(schema)


def planted_bad_queries(
    n_queries: int = 200,
    seed: int = 0,
    n_docs: int = 21,
) -> list[list[LtrRow]]:
    """RankSet-shaped lists over the (s_read, s_edu, s_bad, mixer) schema.

    Each list has one ideal document (label 2), ``n_docs - 2`` retrieved ones
    (label 1) and one planted objectionable document (label 0, cost 1). Relevance
    follows readability (lower grade is better) and educational alignment. The
    planted document's reward features look better than a typical retrieved
    result, its ``s_bad`` is high but overlaps the tail of the others. Rows come
    in a shuffled presentation order.
    """
    rng = np.random.default_rng(seed)
    queries = []
    for q in range(n_queries):
        qid = f"q{q:04d}"
        docs = []
        docs.append((2, rng.uniform(1.0, 5.0), rng.uniform(0.6, 1.0), rng.beta(1.5, 8.0)))
        for _ in range(n_docs - 2):
            docs.append((1, rng.uniform(3.0, 13.0), rng.uniform(0.0, 0.8), rng.beta(1.5, 8.0)))
        docs.append((0, rng.uniform(2.0, 8.0), rng.uniform(0.4, 0.9), rng.uniform(0.3, 1.0)))
        order = rng.permutation(len(docs))
        rows = []
        for rank, i in enumerate(order, 1):
            label, s_read, s_edu, s_bad = docs[i]
            feats = {"s_read": s_read, "s_edu": s_edu, "s_bad": s_bad, "mixer": mixer(s_read, s_edu)}
            cost = 1.0 if label == 0 else float(s_bad)
            rows.append(
                LtrRow(qid, f"{qid}-r{rank:02d}", label, tuple(feats[f] for f in FEATURE_SCHEMA), cost)
            )
        queries.append(rows)
    return queries
