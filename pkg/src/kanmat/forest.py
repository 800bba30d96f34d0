"""Multi-output random forest regressor built on axis-aligned variance splits.

One forest jointly predicts all target columns: splits minimize the summed
per-output squared error and leaves predict per-output means. Each tree draws
its bootstrap rows and per-node feature subsets from an RNG keyed on
(seed, tree index), so training is deterministic and schedule-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import KanmatError
from .util import parallel_map, stable_rng


@dataclass(frozen=True)
class ForestParams:
    n_estimators: int = 100
    min_samples_split: int = 4
    min_samples_leaf: int = 3
    max_features_fraction: float = 0.7
    max_samples_fraction: float = 0.7
    bootstrap: bool = True
    seed: int = 42

    def __post_init__(self):
        if self.n_estimators < 1:
            raise KanmatError("n_estimators must be >= 1")
        if self.min_samples_split < 2 or self.min_samples_leaf < 1:
            raise KanmatError("invalid min_samples settings")
        if not 0.0 < self.max_features_fraction <= 1.0:
            raise KanmatError("max_features_fraction must be in (0, 1]")
        if not 0.0 < self.max_samples_fraction <= 1.0:
            raise KanmatError("max_samples_fraction must be in (0, 1]")


@dataclass
class Tree:
    """Flat array representation; children of node i are left[i] / right[i]."""

    feature: np.ndarray    # split feature per node, -1 for leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray      # per-node mean vector (n_nodes x n_outputs)
    n_rows: np.ndarray     # training rows reaching each node
    bootstrap_rows: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while np.any(active):
            idx = np.nonzero(active)[0]
            nid = node[idx]
            go_left = X[idx, self.feature[nid]] <= self.threshold[nid]
            node[idx] = np.where(go_left, self.left[nid], self.right[nid])
            active = self.feature[node] >= 0
        return self.value[node]

    def leaf_row_counts(self) -> np.ndarray:
        return self.n_rows[self.feature < 0]


@dataclass
class Forest:
    params: ForestParams
    trees: list[Tree] = field(default_factory=list)
    n_features: int = 0
    n_outputs: int = 0

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise KanmatError(f"expected (n, {self.n_features}) feature matrix")
        total = np.zeros((X.shape[0], self.n_outputs))
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)


def _best_split(Xn, Yn, feats, min_leaf):
    """Best (feature, threshold, score) over candidate features, or None.

    Score is the post-split summed SSE across outputs, computed from prefix
    sums over each feature's sorted order. Candidate cut points must respect
    min_leaf on both sides and fall between distinct feature values.
    """
    k = Xn.shape[0]
    total_sum = Yn.sum(axis=0)
    best = None
    for f in feats:
        order = np.argsort(Xn[:, f], kind="stable")
        xs = Xn[order, f]
        ys = Yn[order]
        csum = np.cumsum(ys, axis=0)
        csq = np.cumsum(ys * ys, axis=0)
        counts = np.arange(1, k + 1, dtype=float)

        lo = min_leaf - 1
        hi = k - min_leaf  # exclusive upper bound on cut index
        if hi <= lo:
            continue
        idx = np.arange(lo, hi)
        valid = xs[idx] < xs[idx + 1]
        if not np.any(valid):
            continue
        idx = idx[valid]
        n_left = counts[idx]
        n_right = k - n_left
        sse_left = (csq[idx] - csum[idx] ** 2 / n_left[:, None]).sum(axis=1)
        right_sum = total_sum - csum[idx]
        right_sq = csq[-1] - csq[idx]
        sse_right = (right_sq - right_sum**2 / n_right[:, None]).sum(axis=1)
        scores = sse_left + sse_right
        j = int(np.argmin(scores))
        if best is None or scores[j] < best[2]:
            cut = idx[j]
            thr = 0.5 * (xs[cut] + xs[cut + 1])
            best = (f, float(thr), float(scores[j]), order[: cut + 1], order[cut + 1 :])
    return best


def _grow_tree(X, Y, params: ForestParams, rng) -> Tree:
    n, m = X.shape
    if params.bootstrap:
        n_draw = math.ceil(params.max_samples_fraction * n)
        rows = rng.integers(0, n, size=n_draw)
    else:
        rows = np.arange(n)
    Xb = X[rows]
    Yb = Y[rows]
    m_sub = math.ceil(params.max_features_fraction * m)

    feature, threshold, left, right, value, n_rows = [], [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(Yb[idx].mean(axis=0))
        n_rows.append(idx.shape[0])
        return len(feature) - 1

    root_idx = np.arange(Xb.shape[0])
    stack = [(new_node(root_idx), root_idx)]
    while stack:
        node_id, idx = stack.pop()
        k = idx.shape[0]
        if k < params.min_samples_split or k < 2 * params.min_samples_leaf:
            continue
        feats = rng.choice(m, size=m_sub, replace=False)
        found = _best_split(Xb[idx], Yb[idx], feats, params.min_samples_leaf)
        if found is None:
            continue
        f, thr, _, rel_left, rel_right = found
        feature[node_id] = int(f)
        threshold[node_id] = thr
        left_id = new_node(idx[rel_left])
        right_id = new_node(idx[rel_right])
        left[node_id] = left_id
        right[node_id] = right_id
        stack.append((right_id, idx[rel_right]))
        stack.append((left_id, idx[rel_left]))

    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value),
        n_rows=np.array(n_rows, dtype=np.int64),
        bootstrap_rows=rows,
    )


def fit_random_forest(X, Y, params: ForestParams | None = None, seed: int | None = None) -> Forest:
    """Train a deterministic multi-output forest.

    ``X`` is (n, m); ``Y`` is (n,) or (n, q). ``seed`` overrides
    ``params.seed`` when given. Per-tree RNGs are derived from
    (seed, tree index).
    """
    params = params or ForestParams()
    if seed is not None:
        params = replace(params, seed=seed)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise KanmatError("X must be (n, m) and Y (n, q) with matching n")
    if X.shape[0] < 2 * params.min_samples_split:
        raise KanmatError(
            f"need at least {2 * params.min_samples_split} rows, got {X.shape[0]}"
        )

    def tree_job(t):
        return _grow_tree(X, Y, params, stable_rng(params.seed, "tree", t))

    trees = parallel_map(tree_job, range(params.n_estimators))
    return Forest(params=params, trees=trees, n_features=X.shape[1], n_outputs=Y.shape[1])
