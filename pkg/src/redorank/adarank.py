"""Listwise boosting ranker in the AdaRank family.

Each weak ranker orders a list by a single (per-list min-max normalized)
feature, ascending or descending. Round ``t`` keeps a distribution ``P`` over
training queries and, for every candidate weak ranker ``h``:

* computes ``alpha_h = 0.5 * ln(sum P (1 + E_h) / sum P (1 - E_h))`` from the
  weak ranker's own per-query measure ``E_h``;
* scores the combined model ``f + alpha_h * h`` and its weighted measure
  ``sum P * E(f + alpha_h * h)``.

The best combined candidate is accepted, and ``P`` is reset to
``exp(-E(combined))``, normalized. Training stops after ``max_rounds``, or when
the mean training measure rises by less than ``tolerance``. A round that would
lower it is discarded.

Rows are expected in presentation (search-engine) order, which also breaks
score ties.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    CorruptModel,
    DataError,
    DegenerateLists,
    EmptyTrainingSet,
    MissingFeatures,
    SchemaMismatch,
    VersionMismatch,
)
from .metrics import Measure
from .model import FEATURE_SCHEMA, JudgedList, LtrRow, gain

logger = logging.getLogger(__name__)

FORMAT = "redorank-rankmodel"
VERSION = 1
E_CLAMP = 1.0 - 1e-9


@dataclass(frozen=True)
class WeakRanker:
    feature_index: int
    direction: int

    def __post_init__(self) -> None:
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")


@dataclass(frozen=True)
class RoundLog:
    round: int
    feature: str
    direction: int
    alpha: float
    train_measure: float


@dataclass(frozen=True)
class TrainConfig:
    max_rounds: int = 500
    tolerance: float = 1e-5
    measure: str = "ndcg@10"
    feature_mask: tuple[str, ...] | None = None
    gain_mapping: str = "exp"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.feature_mask is not None:
            object.__setattr__(self, "feature_mask", tuple(self.feature_mask))
            if not self.feature_mask:
                raise ValueError("feature_mask must not be empty")
        Measure.parse(self.measure)


@dataclass(frozen=True)
class RankModel:
    terms: tuple[tuple[WeakRanker, float], ...]
    feature_schema: tuple[str, ...]
    measure_id: str
    training_log: tuple[RoundLog, ...] = ()
    config: TrainConfig = field(default_factory=TrainConfig)
    stop_reason: str = ""

    def __post_init__(self) -> None:
        if not self.feature_schema:
            raise ValueError("feature schema must not be empty")
        for h, alpha in self.terms:
            if not 0 <= h.feature_index < len(self.feature_schema):
                raise ValueError(f"weak ranker feature index {h.feature_index} outside schema")
            if not math.isfinite(alpha):
                raise ValueError("weak ranker weights must be finite")

    def weights(self) -> np.ndarray:
        """Net weight per schema feature (alpha times direction, summed over terms)."""
        w = np.zeros(len(self.feature_schema))
        for h, alpha in self.terms:
            w[h.feature_index] += alpha * h.direction
        return w

    def features_used(self) -> list[str]:
        return sorted({self.feature_schema[h.feature_index] for h, _ in self.terms})


def minmax_normalize(X: np.ndarray) -> np.ndarray:
    """Per-column min-max scaling over one list; constant columns become 0."""
    X = np.asarray(X, dtype=np.float64)
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    return np.where(span > 0, (X - lo) / np.where(span > 0, span, 1.0), 0.0)


def _check_schema(model: RankModel, rows: Sequence[LtrRow]) -> None:
    n = len(model.feature_schema)
    for row in rows:
        if len(row.features) != n:
            raise SchemaMismatch(f"row {row.doc_id} has {len(row.features)} features, model expects {n}")


def score_rows(model: RankModel, rows: Sequence[LtrRow]) -> np.ndarray:
    """Scores for one list; features are normalized over exactly these rows."""
    if not rows:
        return np.zeros(0)
    _check_schema(model, rows)
    X = minmax_normalize(np.array([r.features for r in rows]))
    return X @ model.weights()


def score(model: RankModel, row: LtrRow, context: Sequence[LtrRow] | None = None) -> float:
    """Score a single row. With ``context`` the row is normalized against that list;
    without it the row's features are taken as already normalized."""
    _check_schema(model, [row])
    if context is None:
        return float(np.dot(np.asarray(row.features), model.weights()))
    _check_schema(model, context)
    X = np.array([r.features for r in context] + [row.features])
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = hi - lo
    x = np.where(span > 0, (np.asarray(row.features) - lo) / np.where(span > 0, span, 1.0), 0.0)
    return float(np.dot(x, model.weights()))


def rank_order(scores: Sequence[float], source_ranks: Sequence[int]) -> list[int]:
    """Indices by score descending; ties keep the lower source rank first."""
    return sorted(range(len(scores)), key=lambda i: (-scores[i], source_ranks[i], i))


def rerank(model: RankModel, judged: JudgedList, rows: Mapping[str, LtrRow]) -> JudgedList:
    missing = [r.doc_id for r in judged.resources if r.doc_id not in rows]
    if missing:
        raise MissingFeatures(f"{judged.query_id}: no feature row for {missing[:3]}")
    ordered_rows = [rows[r.doc_id] for r in judged.resources]
    scores = score_rows(model, ordered_rows)
    order = rank_order(scores.tolist(), [r.source_rank for r in judged.resources])
    return JudgedList(judged.query_id, judged.query_text, tuple(judged.resources[i] for i in order))


class _Batch:
    """Padded arrays over all training queries: (Q, L, F) normalized features."""

    def __init__(self, queries: Sequence[Sequence[LtrRow]], n_features: int, gain_mapping: str):
        Q = len(queries)
        L = max(len(q) for q in queries)
        self.lengths = np.array([len(q) for q in queries])
        self.valid = np.arange(L)[None, :] < self.lengths[:, None]
        self.X = np.zeros((Q, L, n_features))
        self.gains = np.full((Q, L), -np.inf)
        self.costs = np.zeros((Q, L))
        for qi, rows in enumerate(queries):
            feats = np.array([r.features for r in rows], dtype=np.float64)
            self.X[qi, : len(rows)] = minmax_normalize(feats)
            self.gains[qi, : len(rows)] = [gain(r.label, gain_mapping) for r in rows]
            self.costs[qi, : len(rows)] = [r.cost for r in rows]
        self.position = np.broadcast_to(np.arange(L), (Q, L))

    def evaluate(self, scores: np.ndarray, measure: Measure, ideal: np.ndarray) -> np.ndarray:
        s = np.where(self.valid, scores, -np.inf)
        order = np.lexsort((self.position, -s), axis=1)
        g = np.take_along_axis(self.gains, order, axis=1)
        c = np.take_along_axis(self.costs, order, axis=1)
        return measure.batch(np.where(np.isfinite(g), g, 0.0), c, self.lengths, ideal)


def _alpha(P: np.ndarray, E: np.ndarray) -> float:
    E = np.clip(E, -E_CLAMP, E_CLAMP)
    return 0.5 * math.log(float(P @ (1.0 + E)) / float(P @ (1.0 - E)))


def train(
    queries: Sequence[Sequence[LtrRow]],
    config: TrainConfig | None = None,
    schema: Sequence[str] = FEATURE_SCHEMA,
) -> RankModel:
    config = config or TrainConfig()
    schema = tuple(schema)
    queries = [list(q) for q in queries]
    if not queries:
        raise EmptyTrainingSet("no training queries")
    for q in queries:
        if len(q) < 2:
            raise DataError(f"query {q[0].query_id if q else '?'} has fewer than 2 documents")
        for r in q:
            if len(r.features) != len(schema):
                raise SchemaMismatch(f"row {r.doc_id} has {len(r.features)} features, schema has {len(schema)}")
            if not all(math.isfinite(v) for v in r.features):
                raise DataError(f"row {r.doc_id} has non-finite features")
    if all(len({r.label for r in q}) == 1 for q in queries):
        raise DegenerateLists("every training list has identical labels")

    mask = config.feature_mask or schema
    unknown = [m for m in mask if m not in schema]
    if unknown:
        raise SchemaMismatch(f"feature mask names {unknown} not in schema {schema}")
    candidates = [WeakRanker(schema.index(f), d) for f in mask for d in (1, -1)]

    measure = Measure.parse(config.measure)
    batch = _Batch(queries, len(schema), config.gain_mapping)
    ideal = measure.ideal(batch.gains, batch.costs, batch.lengths)
    weak_E = [batch.evaluate(h.direction * batch.X[:, :, h.feature_index], measure, ideal) for h in candidates]

    Q = len(queries)
    P = np.full(Q, 1.0 / Q)
    current = np.zeros(batch.gains.shape)
    terms: list[tuple[WeakRanker, float]] = []
    log: list[RoundLog] = []
    prev = None
    stop_reason = "max_rounds"
    for t in range(1, config.max_rounds + 1):
        best = None
        for h, E_h in zip(candidates, weak_E):
            alpha = _alpha(P, E_h)
            combined = current + alpha * h.direction * batch.X[:, :, h.feature_index]
            E_c = batch.evaluate(combined, measure, ideal)
            weighted = float(P @ E_c)
            if best is None or weighted > best[0]:
                best = (weighted, h, alpha, combined, E_c)
        _, h, alpha, combined, E_c = best
        value = float(np.mean(E_c))
        if prev is not None and value < prev:
            stop_reason = "measure_decreased"
            break
        terms.append((h, alpha))
        current = combined
        log.append(RoundLog(t, schema[h.feature_index], h.direction, alpha, value))
        logger.debug("round %d: %s dir=%+d alpha=%.4f %s=%.6f", t, schema[h.feature_index], h.direction, alpha, measure.id, value)
        if prev is not None and value - prev < config.tolerance:
            stop_reason = "converged"
            break
        prev = value
        weights = np.exp(-np.clip(E_c, -E_CLAMP, E_CLAMP))
        P = weights / weights.sum()

    return RankModel(
        terms=tuple(terms),
        feature_schema=schema,
        measure_id=measure.id,
        training_log=tuple(log),
        config=config,
        stop_reason=stop_reason,
    )


def model_to_json(model: RankModel) -> str:
    cfg = asdict(model.config)
    cfg["feature_mask"] = list(model.config.feature_mask) if model.config.feature_mask else None
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "feature_schema": list(model.feature_schema),
        "measure": model.measure_id,
        "terms": [
            {"feature_index": h.feature_index, "direction": h.direction, "alpha": alpha}
            for h, alpha in model.terms
        ],
        "training_log": [asdict(r) for r in model.training_log],
        "config": cfg,
        "stop_reason": model.stop_reason,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def model_from_json(text: str) -> RankModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CorruptModel("not a rank model file")
    if doc.get("version") != VERSION:
        raise VersionMismatch(f"model file version {doc.get('version')}, expected {VERSION}")
    try:
        cfg = dict(doc["config"])
        if cfg.get("feature_mask") is not None:
            cfg["feature_mask"] = tuple(cfg["feature_mask"])
        return RankModel(
            terms=tuple(
                (WeakRanker(int(t["feature_index"]), int(t["direction"])), float(t["alpha"])) for t in doc["terms"]
            ),
            feature_schema=tuple(doc["feature_schema"]),
            measure_id=str(doc["measure"]),
            training_log=tuple(RoundLog(**r) for r in doc["training_log"]),
            config=TrainConfig(**cfg),
            stop_reason=str(doc.get("stop_reason", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed model file: {exc}") from exc


def save_model(model: RankModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def load_model(path: str | Path) -> RankModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"))
