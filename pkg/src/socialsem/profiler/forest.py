"""Random forest of Gini decision trees, grown from scratch.

Trees are stored as flat pre-order node arrays; ``feature == -1`` marks a leaf
and samples with ``x[feature] <= threshold`` go left.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int = 16
    min_leaf: int = 2
    max_features: int | None = None  # None -> ceil(sqrt(n_features))
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")


@dataclass(frozen=True)
class DecisionTree:
    feature: np.ndarray    # int, -1 for leaves
    threshold: np.ndarray  # float
    left: np.ndarray       # int child ids, -1 for leaves
    right: np.ndarray
    value: np.ndarray      # label index at leaves, -1 for internal nodes
    n_features: int
    seed: int = 0

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf label index for every row of ``X``."""
        X = np.atleast_2d(X)
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        while True:
            feat = self.feature[node]
            inner = feat >= 0
            if not inner.any():
                return self.value[node]
            r, nd = rows[inner], node[inner]
            go_left = X[r, self.feature[nd]] <= self.threshold[nd]
            node[inner] = np.where(go_left, self.left[nd], self.right[nd])

    def predict_one(self, x: Sequence[float]) -> int:
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return int(self.value[node])


def _gini_best_split(xs: np.ndarray, ys: np.ndarray, n_classes: int, min_leaf: int):
    """Lowest weighted Gini impurity split of one feature: (impurity, threshold) or None."""
    order = np.argsort(xs, kind="stable")
    xs, ys = xs[order], ys[order]
    n = xs.size
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), ys] = 1.0
    left_counts = np.cumsum(onehot, axis=0)[:-1]
    right_counts = left_counts[-1] + onehot[-1] - left_counts
    n_left = np.arange(1, n, dtype=float)
    n_right = n - n_left
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    gini_l = 1.0 - np.sum(left_counts**2, axis=1) / n_left**2
    gini_r = 1.0 - np.sum(right_counts**2, axis=1) / n_right**2
    weighted = np.where(valid, (n_left * gini_l + n_right * gini_r) / n, np.inf)
    i = int(np.argmin(weighted))
    lo, hi = xs[i], xs[i + 1]
    thr = (lo + hi) / 2.0
    if thr >= hi:
        thr = lo
    return float(weighted[i]), float(thr)


def _majority(ys: np.ndarray, n_classes: int) -> int:
    return int(np.argmax(np.bincount(ys, minlength=n_classes)))


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    params: ForestParams,
    rng: np.random.Generator,
    seed: int = 0,
) -> DecisionTree:
    """Grow one tree on ``(X, y)``; ``y`` holds label indices."""
    n_samples, n_features = X.shape
    k = params.max_features or math.ceil(math.sqrt(n_features))
    k = max(1, min(k, n_features))
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[int] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(-1)
        return len(feature) - 1

    def build(idx: np.ndarray, depth: int) -> int:
        node = new_node()
        ys = y[idx]
        if (
            depth >= params.max_depth
            or idx.size < 2 * params.min_leaf
            or np.all(ys == ys[0])
        ):
            value[node] = _majority(ys, n_classes)
            return node
        order = rng.permutation(n_features)
        best = None
        # sampled features first; fall back to the rest only if none of them can split
        for start, stop in ((0, k), (k, n_features)):
            for f in order[start:stop]:
                found = _gini_best_split(X[idx, f], ys, n_classes, params.min_leaf)
                if found is not None and (best is None or found[0] < best[0]):
                    best = (found[0], found[1], int(f))
            if best is not None:
                break
        if best is None:
            value[node] = _majority(ys, n_classes)
            return node
        _, thr, f = best
        go_left = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = build(idx[go_left], depth + 1)
        right[node] = build(idx[~go_left], depth + 1)
        return node

    build(np.arange(n_samples), 0)
    return DecisionTree(
        np.array(feature, dtype=np.intp),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.intp),
        np.array(right, dtype=np.intp),
        np.array(value, dtype=np.intp),
        n_features,
        seed,
    )


def tree_seed(master_seed: int, tree_index: int) -> int:
    """Deterministic per-tree seed derived from the master seed."""
    return int(np.random.SeedSequence([master_seed, tree_index]).generate_state(1)[0])


@dataclass(frozen=True)
class Forest:
    trees: tuple[DecisionTree, ...]
    labels: tuple[str, ...]
    n_features: int

    def __post_init__(self):
        if not self.trees:
            raise ValueError("a forest needs at least one tree")

    def votes(self, X: np.ndarray) -> np.ndarray:
        """``(n_samples, n_labels)`` vote counts."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"forest expects {self.n_features} features, got {X.shape[1]}"
            )
        counts = np.zeros((X.shape[0], len(self.labels)), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            np.add.at(counts, (rows, tree.apply(X)), 1)
        return counts

    def predict_indices(self, X: np.ndarray) -> np.ndarray:
        # argmax returns the first maximum: ties go to the lowest label index
        return np.argmax(self.votes(X), axis=1)

    def predict(self, X: np.ndarray) -> list[str]:
        return [self.labels[i] for i in self.predict_indices(X)]


def forest_predict(forest: Forest, x: Sequence[float]) -> str:
    """Majority-vote label for one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size != forest.n_features:
        raise ValueError(f"forest expects {forest.n_features} features, got shape {x.shape}")
    return forest.predict(x[None, :])[0]


def train_forest(
    F,
    labels: Sequence[str],
    n_trees: int | None = None,
    params: ForestParams | None = None,
    seed: int = 0,
    label_order: Sequence[str] | None = None,
    threads: int = 1,
) -> Forest:
    """Bagged Gini trees with ``ceil(sqrt(s))`` candidate features per split.

    ``label_order`` fixes the label index order (and so the vote tie-break);
    by default labels are ordered by first appearance.
    """
    X = np.asarray(getattr(F, "values", F), dtype=np.float64)
    params = params or ForestParams()
    if n_trees is not None and n_trees != params.n_trees:
        params = ForestParams(n_trees, params.max_depth, params.min_leaf,
                              params.max_features, params.bootstrap)
    if X.ndim != 2 or X.shape[0] != len(labels):
        raise ValueError("feature rows and labels differ in length")
    if X.shape[0] < 2:
        raise ValueError("need at least two training rows")
    order = tuple(label_order) if label_order is not None else tuple(dict.fromkeys(labels))
    index = {lab: i for i, lab in enumerate(order)}
    try:
        y = np.array([index[lab] for lab in labels], dtype=np.intp)
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]!r} not in label order {list(order)}") from None

    def one(t: int) -> DecisionTree:
        s = tree_seed(seed, t)
        rng = np.random.default_rng(s)
        if params.bootstrap:
            rows = rng.integers(0, X.shape[0], size=X.shape[0])
        else:
            rows = np.arange(X.shape[0])
        return grow_tree(X[rows], y[rows], len(order), params, rng, s)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = tuple(pool.map(one, range(params.n_trees)))
    else:
        trees = tuple(one(t) for t in range(params.n_trees))
    return Forest(trees, order, X.shape[1])
