"""Gini-trained random forest producing the probability that a snippet is objectionable.

Trees grow best-first (largest impurity decrease expands next) so that
``max_leaf_nodes`` is honoured the same way as in common tree libraries.
Each tree sees a bootstrap sample and ``ceil(sqrt(n_features))`` candidate
features per split. Tree ``i`` draws from ``default_rng([seed, i])`` so
results do not depend on how training is parallelized.
"""

from __future__ import annotations

import heapq
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import CorruptModel, InsufficientData, SingleClassData, VersionMismatch
from .features import FEATURE_NAMES, ObjFeatures

FORMAT = "redorank-forest"
VERSION = 1
LEAF = -1


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int = 8
    max_leaf_nodes: int = 32
    min_samples_leaf: int = 32
    min_samples_split: int = 32
    max_features: int | None = None
    bootstrap: bool = True


@dataclass(frozen=True, eq=False)
class Tree:
    """Flat node arrays. ``value[n]`` holds (P(ok), P(bad)) at node ``n``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for n in range(self.n_nodes):
            if self.feature[n] != LEAF:
                depths[self.left[n]] = depths[self.right[n]] = depths[n] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            feat = self.feature[node]
            active = feat != LEAF
            if not active.any():
                return node
            idx = rows[active]
            n = node[idx]
            go_left = X[idx, feat[active]] <= self.threshold[n]
            node[idx] = np.where(go_left, self.left[n], self.right[n])

    def predict_bad(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X), 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("feature", "threshold", "left", "right", "value")
        )

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        tree = cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=np.float64).reshape(-1, 2),
        )
        n = tree.n_nodes
        if not n or any(len(a) != n for a in (tree.threshold, tree.left, tree.right, tree.value)):
            raise CorruptModel("tree node arrays have inconsistent lengths")
        inner = tree.feature != LEAF
        if np.any(tree.left[inner] <= np.flatnonzero(inner)) or np.any(tree.left[inner] >= n) or np.any(
            tree.right[inner] >= n
        ):
            raise CorruptModel("tree child pointers out of range")
        return tree


@dataclass(frozen=True)
class Forest:
    trees: tuple[Tree, ...]
    params: ForestParams
    seed: int
    n_features: int = len(FEATURE_NAMES)

    def predict_proba(self, X) -> np.ndarray:
        """P(objectionable) per row: the mean of per-tree leaf class frequencies."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        if not self.trees:
            return np.zeros(len(X))
        total = np.zeros(len(X))
        for tree in self.trees:
            total += tree.predict_bad(X)
        return np.clip(total / len(self.trees), 0.0, 1.0)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) > 0.5).astype(int)


def s_bad(forest: Forest, features: ObjFeatures | Sequence[float]) -> float:
    vec = features.as_vector() if isinstance(features, ObjFeatures) else list(features)
    return float(forest.predict_proba([vec])[0])


def _gini(pos: np.ndarray, n: np.ndarray) -> np.ndarray:
    p = pos / n
    return 2.0 * p * (1.0 - p)


def _best_split(X, y, idx, features, params: ForestParams, rng) -> tuple[float, int, float] | None:
    """Best (impurity decrease, feature, threshold) for node samples ``idx``, or None."""
    n = len(idx)
    pos_total = y[idx].sum()
    parent = n * _gini(np.float64(pos_total), np.float64(n))
    min_leaf = params.min_samples_leaf
    best = None
    evaluated = 0
    for f in rng.permutation(features):
        if evaluated >= params.max_features:
            break
        col = X[idx, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        if xs[0] == xs[-1]:
            continue
        evaluated += 1
        ys = y[idx][order]
        left_n = np.arange(1, n)
        left_pos = np.cumsum(ys)[:-1]
        right_n = n - left_n
        right_pos = pos_total - left_pos
        valid = (xs[:-1] < xs[1:]) & (left_n >= min_leaf) & (right_n >= min_leaf)
        if not valid.any():
            continue
        child = left_n * _gini(left_pos, left_n) + right_n * _gini(right_pos, right_n)
        child = np.where(valid, child, np.inf)
        i = int(np.argmin(child))
        decrease = parent - child[i]
        if decrease <= 1e-12:
            continue
        thr = (xs[i] + xs[i + 1]) / 2.0
        if not xs[i] <= thr < xs[i + 1]:
            thr = xs[i]
        if best is None or decrease > best[0]:
            best = (float(decrease), int(f), float(thr))
    return best


def _grow_tree(X: np.ndarray, y: np.ndarray, params: ForestParams, rng: np.random.Generator) -> Tree:
    n_rows, n_feat = X.shape
    sample = rng.integers(0, n_rows, size=n_rows) if params.bootstrap else np.arange(n_rows)
    features = np.arange(n_feat)

    feature, threshold, left, right, value, depth = [], [], [], [], [], []

    def new_node(idx: np.ndarray, d: int) -> int:
        p_bad = float(y[idx].mean())
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append([1.0 - p_bad, p_bad])
        depth.append(d)
        return len(feature) - 1

    heap: list = []
    members: dict[int, np.ndarray] = {}

    def consider(node: int, idx: np.ndarray) -> None:
        if depth[node] >= params.max_depth or len(idx) < params.min_samples_split:
            return
        if value[node][1] in (0.0, 1.0):
            return
        split = _best_split(X, y, idx, features, params, rng)
        if split is not None:
            decrease, f, thr = split
            # node id breaks ties so expansion order is fully determined
            heapq.heappush(heap, (-decrease, node, f, thr))
            members[node] = idx

    root_idx = sample
    consider(new_node(root_idx, 0), root_idx)
    leaves = 1
    while heap and leaves < params.max_leaf_nodes:
        _, node, f, thr = heapq.heappop(heap)
        idx = members.pop(node)
        mask = X[idx, f] <= thr
        l_idx, r_idx = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(l_idx, depth[node] + 1)
        right[node] = new_node(r_idx, depth[node] + 1)
        leaves += 1
        consider(left[node], l_idx)
        consider(right[node], r_idx)

    return Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64),
    )


def train_forest(
    X: Sequence[Sequence[float]] | np.ndarray,
    y: Sequence[int] | np.ndarray,
    params: ForestParams | None = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> Forest:
    """Fit the forest on feature rows ``X`` with classes ``y`` (1 = objectionable)."""
    params = params or ForestParams()
    X = np.asarray([f.as_vector() if isinstance(f, ObjFeatures) else f for f in X], dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y):
        raise InsufficientData("feature matrix and class vector disagree in length")
    if len(X) < 2 * params.min_samples_split:
        raise InsufficientData(f"need at least {2 * params.min_samples_split} rows, got {len(X)}")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("classes must be 0 (ok) or 1 (bad)")
    if len(np.unique(y)) < 2:
        raise SingleClassData("training data holds a single class")
    if params.max_features is None:
        params = ForestParams(**{**asdict(params), "max_features": math.ceil(math.sqrt(X.shape[1]))})

    def grow(i: int) -> Tree:
        return _grow_tree(X, y, params, np.random.default_rng([seed, i]))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = tuple(pool.map(grow, range(params.n_trees)))
    else:
        trees = tuple(grow(i) for i in range(params.n_trees))
    return Forest(trees=trees, params=params, seed=seed, n_features=X.shape[1])


def forest_to_json(forest: Forest) -> str:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "params": asdict(forest.params),
        "seed": forest.seed,
        "n_features": forest.n_features,
        "trees": [t.to_dict() for t in forest.trees],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def forest_from_json(text: str) -> Forest:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"forest file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CorruptModel("not a forest model file")
    if doc.get("version") != VERSION:
        raise VersionMismatch(f"forest file version {doc.get('version')}, expected {VERSION}")
    try:
        forest = Forest(
            trees=tuple(Tree.from_dict(t) for t in doc["trees"]),
            params=ForestParams(**doc["params"]),
            seed=int(doc["seed"]),
            n_features=int(doc["n_features"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed forest file: {exc}") from exc
    return forest


def save_forest(forest: Forest, path: str | Path) -> None:
    Path(path).write_text(forest_to_json(forest), encoding="utf-8")


def load_forest(path: str | Path) -> Forest:
    return forest_from_json(Path(path).read_text(encoding="utf-8"))
