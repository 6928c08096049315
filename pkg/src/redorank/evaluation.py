"""Offline evaluation of rankers over feature files, and the ablation harness."""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .adarank import RankModel, TrainConfig, rank_order, score_rows, train
from .errors import InsufficientQueries, SchemaMismatch
from .metrics import ndcg_at_k, reciprocal_rank, ttest_pvalue
from .model import LtrRow, gain

METRICS = ("ndcg@10", "mrr", "mrr_bad")


@dataclass(frozen=True)
class QueryResult:
    query_id: str
    ndcg: float
    rr: float
    rr_bad: float


@dataclass(frozen=True)
class EvalConfig:
    k: int = 10
    gain_mapping: str = "exp"
    relevant_label: int = 2


def evaluate_ranking(
    query_id: str,
    ranked_labels: Sequence[int],
    ranked_bad: Sequence[bool],
    config: EvalConfig = EvalConfig(),
) -> QueryResult:
    gains = [gain(lab, config.gain_mapping) for lab in ranked_labels]
    return QueryResult(
        query_id,
        ndcg_at_k(gains, config.k),
        reciprocal_rank([lab >= config.relevant_label for lab in ranked_labels]),
        reciprocal_rank(ranked_bad),
    )


def evaluate_scores(
    queries: Mapping[str, Sequence[LtrRow]],
    scorer: Callable[[Sequence[LtrRow]], Sequence[float]],
    config: EvalConfig = EvalConfig(),
    is_bad: Callable[[LtrRow], bool] = lambda r: r.label == 0,
) -> list[QueryResult]:
    """Rank each query by ``scorer`` (ties: presentation order) and score it.

    Queries are processed in sorted id order so aggregate means are bit-stable.
    By default a label-0 row counts as objectionable, as in RankSet-style data.
    """
    out = []
    for qid in sorted(queries):
        rows = list(queries[qid])
        order = rank_order(list(scorer(rows)), list(range(len(rows))))
        ranked = [rows[i] for i in order]
        out.append(evaluate_ranking(qid, [r.label for r in ranked], [is_bad(r) for r in ranked], config))
    return out


def evaluate_model(model: RankModel, queries: Mapping[str, Sequence[LtrRow]], config: EvalConfig = EvalConfig(), **kw):
    return evaluate_scores(queries, lambda rows: score_rows(model, rows).tolist(), config, **kw)


def summarize(results: Sequence[QueryResult]) -> dict[str, float]:
    if not results:
        return {m: float("nan") for m in METRICS}
    return {
        "ndcg@10": float(np.mean([r.ndcg for r in results])),
        "mrr": float(np.mean([r.rr for r in results])),
        "mrr_bad": float(np.mean([r.rr_bad for r in results])),
    }


def split_queries(query_ids: Sequence[str], train_ratio: float = 0.8, seed: int = 0) -> tuple[list[str], list[str]]:
    """Stable hash split: a query's side depends only on its id, the seed and the ratio."""
    train_ids, test_ids = [], []
    for qid in sorted(query_ids):
        h = int(hashlib.sha1(f"{seed}:{qid}".encode("utf-8")).hexdigest()[:8], 16) / 16**8
        (train_ids if h < train_ratio else test_ids).append(qid)
    return train_ids, test_ids


@dataclass(frozen=True)
class AblationVariant:
    row: int
    algorithm: str
    measure: str
    features: tuple[str, ...]


ABLATIONS = (
    AblationVariant(1, "AdaRank", "ndcg", ("s_read", "s_edu", "s_bad")),
    AblationVariant(2, "AdaRank-E", "ndcg", ("s_edu",)),
    AblationVariant(3, "AdaRank-R", "ndcg", ("s_read",)),
    AblationVariant(4, "AdaRank-O", "ndcg", ("s_bad",)),
    AblationVariant(5, "REdORank-E", "ncs_dcg", ("s_edu",)),
    AblationVariant(6, "REdORank-R", "ncs_dcg", ("s_read",)),
    AblationVariant(7, "REdORank-O", "ncs_dcg", ("s_bad",)),
    AblationVariant(8, "REdORank-M", "ncs_dcg", ("mixer",)),
    AblationVariant(9, "REdORank-MER", "ncs_dcg", ("mixer", "s_edu", "s_read")),
    AblationVariant(10, "REdORank", "ncs_dcg", ("s_read", "s_edu", "s_bad", "mixer")),
)
FULL_ROW = 10


@dataclass(frozen=True)
class AblationOutcome:
    variant: AblationVariant
    model: RankModel
    results: tuple[QueryResult, ...]

    @property
    def summary(self) -> dict[str, float]:
        return summarize(self.results)


def run_ablation(
    queries: Mapping[str, Sequence[LtrRow]],
    schema: Sequence[str],
    train_ratio: float = 0.8,
    seed: int = 0,
    base: TrainConfig = TrainConfig(),
    eval_config: EvalConfig = EvalConfig(),
    train_k: int | None = 10,
    variants: Sequence[AblationVariant] = ABLATIONS,
) -> list[AblationOutcome]:
    """Train each variant on the train split and evaluate it on the held-out split."""
    if len(queries) < 10:
        raise InsufficientQueries(f"ablation needs at least 10 queries, got {len(queries)}")
    needed = {f for v in variants for f in v.features}
    missing = sorted(needed - set(schema))
    if missing:
        raise SchemaMismatch(f"feature file lacks {missing}; ablation needs the full schema")
    train_ids, test_ids = split_queries(list(queries), train_ratio, seed)
    if not train_ids or not test_ids:
        raise InsufficientQueries(f"split left {len(train_ids)} train / {len(test_ids)} test queries")
    train_lists = [queries[q] for q in train_ids]
    test_map = {q: queries[q] for q in test_ids}
    k = "all" if train_k is None else train_k
    outcomes = []
    for v in variants:
        cfg = TrainConfig(
            max_rounds=base.max_rounds,
            tolerance=base.tolerance,
            measure=f"{v.measure}@{k}",
            feature_mask=v.features,
            gain_mapping=base.gain_mapping,
            seed=seed,
        )
        model = train(train_lists, cfg, schema)
        outcomes.append(AblationOutcome(v, model, tuple(evaluate_model(model, test_map, eval_config))))
    return outcomes


def _f(x: float) -> str:
    return "" if x != x else f"{x:.6f}"


def ablation_csv(outcomes: Sequence[AblationOutcome]) -> str:
    full = next((o for o in outcomes if o.variant.row == FULL_ROW), None)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["row", "algorithm", "optimization_metric", "features", "ndcg@10", "mrr", "mrr_bad",
         "p_ndcg@10", "p_mrr", "p_mrr_bad", "rounds"]
    )
    for o in outcomes:
        s = o.summary
        pvals = ["", "", ""]
        if full is not None and o is not full:
            pvals = [
                _f(ttest_pvalue([getattr(r, attr) for r in o.results], [getattr(r, attr) for r in full.results]))
                for attr in ("ndcg", "rr", "rr_bad")
            ]
        metric = "NDCG" if o.variant.measure == "ndcg" else "nCS-DCG"
        w.writerow(
            [o.variant.row, o.variant.algorithm, metric, "+".join(o.variant.features),
             _f(s["ndcg@10"]), _f(s["mrr"]), _f(s["mrr_bad"]), *pvals, len(o.model.terms)]
        )
    return buf.getvalue()


def metrics_csv(summary: Mapping[str, float]) -> str:
    return "metric,value\n" + "".join(f"{k},{_f(v)}\n" for k, v in summary.items())


def per_query_csv(results: Sequence[QueryResult], label: str | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((["model"] if label is not None else []) + ["query_id", "ndcg@10", "rr", "rr_bad"])
    for r in results:
        w.writerow(([label] if label is not None else []) + [r.query_id, _f(r.ndcg), _f(r.rr), _f(r.rr_bad)])
    return buf.getvalue()
