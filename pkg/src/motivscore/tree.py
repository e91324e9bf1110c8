"""CART trees and random forests with mean-decrease-in-impurity importance.

Trees are stored as parallel node arrays (sklearn style).  Node 0 is the
root; leaves have ``feature == -1``.  A row goes left iff
``x[feature] <= threshold``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _cart
from .errors import DegenerateForest, DimensionMismatch
from .rng import generator, split_mix

CLASSIFY = "classify"
REGRESS = "regress"

class Split(NamedTuple):
    feature: int
    threshold: float
    gain: float


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # class counts (n_nodes, n_classes) or means (n_nodes,)
    n_samples: np.ndarray
    impurity: np.ndarray
    gain: np.ndarray  # impurity decrease at internal nodes, 0 at leaves
    task: str
    n_features: int
    classes: Optional[np.ndarray] = None

    @property
    def node_count(self):
        return len(self.feature)

    @property
    def depth(self):
        depth = np.zeros(self.node_count, dtype=int)
        for i in range(self.node_count):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X):
        """Index of the leaf reached by each row."""
        X = _check_features(X, self.n_features)
        node = np.zeros(len(X), dtype=int)
        active = np.full(len(X), self.feature[0] >= 0)
        while active.any():
            rows = np.flatnonzero(active)
            nd = node[rows]
            go_left = X[rows, self.feature[nd]] <= self.threshold[nd]
            node[rows] = np.where(go_left, self.left[nd], self.right[nd])
            active[rows] = self.feature[node[rows]] >= 0
        return node

    def predict_index(self, X):
        # classification only: index into self.classes, ties to the lower index
        return np.argmax(self.value[self.apply(X)], axis=1)

    def predict(self, X):
        if self.task == CLASSIFY:
            return self.classes[self.predict_index(X)]
        return self.value[self.apply(X)]

    def to_dict(self, node=0):
        """Nested JSON-ready form of the subtree rooted at ``node``."""
        if self.feature[node] < 0:
            value = self.value[node]
            leaf = [float(v) for v in value] if self.task == CLASSIFY else float(value)
            return {"leaf": leaf, "n_samples": int(self.n_samples[node])}
        return {
            "feature_index": int(self.feature[node]),
            "threshold": float(self.threshold[node]),
            "children": [self.to_dict(self.left[node]), self.to_dict(self.right[node])],
        }


@dataclass(frozen=True)
class Forest:
    trees: tuple
    per_tree_seeds: tuple
    n_features_per_split: int
    task: str
    classes: Optional[np.ndarray] = None
    oob_indices: Optional[tuple] = None

    @property
    def n_features(self):
        return self.trees[0].n_features


def _check_features(X, n_features):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != n_features:
        raise DimensionMismatch(f"expected {n_features} columns, got shape {X.shape}")
    return X


def gini(counts):
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    return 1.0 - float(np.sum((counts / n) ** 2)) if n else 0.0


def _encode(y, task, classes=None):
    """Targets in the form the split search works on.

    Classification: one-hot matrix over ``classes``.  Regression: float vector.
    """
    if task == CLASSIFY:
        if classes is None:
            classes = np.unique(y)
        codes = np.searchsorted(classes, y)
        known = classes[np.minimum(codes, len(classes) - 1)]
        if np.any(codes >= len(classes)) or np.any(known != y):
            raise ValueError("labels outside the known classes")
        return np.eye(len(classes))[codes], classes
    if task == REGRESS:
        return np.asarray(y, dtype=float), None
    raise ValueError(f"unknown task {task!r}")


def _targets(Y, task):
    Y = Y if task == CLASSIFY else Y.reshape(-1, 1)
    return np.ascontiguousarray(Y, dtype=float)


def best_split(X, y, candidate_features, task, min_leaf=1):
    """Exhaustive CART split search over midpoints of distinct sorted values.

    Gain is the decrease from the node impurity (Gini or variance) to the
    size-weighted child impurity.  Ties go to the lowest feature index, then
    the lowest threshold.  Returns ``None`` when no split has positive gain.
    """
    X = np.ascontiguousarray(X, dtype=float)
    Y, _ = _encode(np.asarray(y), task)
    Y = _targets(Y, task)
    n = len(X)
    if n == 0:
        return None
    rows = np.arange(n)
    classify = task == CLASSIFY
    parent = _cart.node_stats(Y, rows, 0, n, classify, np.zeros(Y.shape[1]))
    features = np.sort(np.asarray(candidate_features, dtype=np.int64))
    f, thr, g = _cart.split_kernel(X, Y, rows, 0, n, features, classify, min_leaf, parent)
    return None if f < 0 else Split(int(f), float(thr), float(g))


def cart_fit(X, y, task, max_depth=None, min_split=2, min_leaf=1,
             n_features_per_split=None, seed=0, classes=None):
    """Grow a CART tree greedily until purity or a size/depth limit.

    With ``n_features_per_split`` below the feature count, each node scans a
    uniform random feature subset drawn from a generator seeded by ``seed``;
    otherwise ``seed`` is unused.
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y):
        raise DimensionMismatch(f"X has shape {X.shape} but y has length {len(y)}")
    if len(y) == 0:
        raise ValueError("cannot grow a tree on zero samples")
    Y, classes = _encode(y, task, classes)
    n, p = X.shape
    mtry = p if n_features_per_split is None else max(1, min(int(n_features_per_split), p))
    if mtry < p:
        keys = generator(seed).random((2 * n - 1, p))
    else:
        keys = np.zeros((1, p))
    arrays = _cart.grow(X, _targets(Y, task), task == CLASSIFY,
                        -1 if max_depth is None else int(max_depth),
                        int(min_split), int(min_leaf), mtry, keys)
    feature, threshold, left, right, value, n_samples, impurity, gain = arrays
    if task == REGRESS:
        value = value[:, 0]
    return Tree(feature, threshold, left, right, value, n_samples, impurity, gain,
                task, p, classes)


def cart_predict(t, X):
    return t.predict(X)


def default_features_per_split(p, task):
    return max(1, math.ceil(math.sqrt(p))) if task == CLASSIFY else p


def rf_fit(X, y, task, n_trees=100, max_depth=None, min_split=2, min_leaf=1,
           n_features_per_split=None, bootstrap=True, seed=0):
    """Random forest of CART trees.

    Tree ``i`` uses seed ``split_mix(seed, i)`` for both its bootstrap draw
    and its per-node feature subsets, so the forest does not depend on the
    order in which trees are grown.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    n, p = X.shape
    if n < 2:
        raise ValueError("a forest needs at least two samples")
    if n_features_per_split is None:
        n_features_per_split = default_features_per_split(p, task)
    classes = np.unique(y) if task == CLASSIFY else None
    seeds = tuple(split_mix(seed, i) for i in range(n_trees))
    trees, oob = [], []
    for tree_seed in seeds:
        rng = generator(tree_seed)
        if bootstrap:
            rows = rng.integers(0, n, n)
            oob.append(tuple(int(i) for i in np.setdiff1d(np.arange(n), rows)))
        else:
            rows = np.arange(n)
        tree = cart_fit(X[rows], y[rows], task, max_depth=max_depth, min_split=min_split,
                        min_leaf=min_leaf, n_features_per_split=n_features_per_split,
                        seed=int(rng.integers(0, 2**63)), classes=classes)
        trees.append(tree)
    return Forest(tuple(trees), seeds, int(n_features_per_split), task, classes,
                  tuple(oob) if bootstrap else None)


def rf_predict(f, X):
    """Majority vote (ties to the lower class) or mean of tree outputs."""
    X = _check_features(X, f.n_features)
    if f.task == CLASSIFY:
        votes = np.stack([t.predict_index(X) for t in f.trees])
        counts = (votes[None, :, :] == np.arange(len(f.classes))[:, None, None]).sum(axis=1)
        return f.classes[np.argmax(counts, axis=0)]
    preds = np.stack([t.predict(X) for t in f.trees])
    # sorting first makes the mean independent of tree order
    return np.sort(preds, axis=0).mean(axis=0)


def tree_importance(t):
    """Unnormalized per-feature sum of (n_node / n_root) * impurity decrease."""
    imp = np.zeros(t.n_features)
    internal = t.feature >= 0
    np.add.at(imp, t.feature[internal],
              t.n_samples[internal] / t.n_samples[0] * t.gain[internal])
    return imp


def mdi_importance(f):
    trees = f.trees if isinstance(f, Forest) else (f,)
    imp = np.mean([tree_importance(t) for t in trees], axis=0)
    total = imp.sum()
    if not total > 0.0:
        raise DegenerateForest("no tree made a split")
    return imp / total
