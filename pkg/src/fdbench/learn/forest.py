"""Random forests of CART trees with the tuning transformations used for ranger."""
import math

import numpy as np

from fdbench.learn.base import Learner, vote
from fdbench.learn.tree import apply_tree, grow_tree


def mtry_from_power(p, power):
    """Features tried per split, ``ceil(p ** power)`` clipped to [1, p]."""
    return int(min(p, max(1, math.ceil(p ** power - 1e-12))))


def node_size_from_exp(n, exp):
    """Minimum node size ``ceil(2 ** (log2(n) * exp))``."""
    return int(max(1, math.ceil(2.0 ** (math.log2(n) * exp) - 1e-9)))


def _grow_forest(X, y, criterion, n_trees, mtry, min_node, sample_fraction, seed, n_classes=None):
    n = X.shape[0]
    n_sample = max(1, math.ceil(sample_fraction * n - 1e-12))
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child)
        rows = np.sort(rng.choice(n, size=n_sample, replace=False))
        trees.append(grow_tree(X[rows], y[rows], criterion, min_node, None, mtry, rng, n_classes))
    return trees


class ForestClassifier(Learner):
    """Bagged CART trees voting by majority (ties to the lowest label).

    Each tree draws ``ceil(sample_fraction * N)`` rows without replacement and
    considers ``ceil(p ** mtry_power)`` random features per split. Per-tree
    generators are spawned from ``seed`` so trees are independent of order.
    """

    method = "forest"

    def __init__(self, n_trees=100, mtry_power=0.5, min_node_size_exp=0.0, sample_fraction=0.632, seed=0):
        if int(n_trees) < 1:
            raise ValueError("n_trees must be at least 1")
        if not 0.0 <= mtry_power <= 1.0:
            raise ValueError("mtry_power must lie in [0, 1]")
        if not 0.0 <= min_node_size_exp < 1.0:
            raise ValueError("min_node_size_exp must lie in [0, 1)")
        if not 0.0 < sample_fraction <= 1.0:
            raise ValueError("sample_fraction must lie in (0, 1]")
        super().__init__(n_trees=int(n_trees), mtry_power=float(mtry_power),
                         min_node_size_exp=float(min_node_size_exp),
                         sample_fraction=float(sample_fraction), seed=int(seed))

    def fit(self, X, y):
        X = self._check_X(X)
        y = np.asarray(y, dtype=np.intp)
        p = self.params
        self.classes_ = np.unique(y)
        self.n_features_ = X.shape[1]
        self.mtry_ = mtry_from_power(X.shape[1], p["mtry_power"])
        self.min_node_size_ = node_size_from_exp(len(y), p["min_node_size_exp"])
        self.trees_ = _grow_forest(X, y, "gini", p["n_trees"], self.mtry_, self.min_node_size_,
                                   p["sample_fraction"], p["seed"], int(y.max()) + 1)
        return self

    def tree_predictions(self, X):
        """N x n_trees matrix of per-tree class predictions."""
        self._check_fitted()
        X = self._check_X(X)
        return np.column_stack([np.argmax(t["value"][apply_tree(t, X)], axis=1) for t in self.trees_])

    def predict(self, X):
        return vote(self.tree_predictions(X), int(self.classes_.max()) + 1)

    def get_state(self):
        return {"trees": self.trees_, "classes": self.classes_, "n_features": self.n_features_,
                "mtry": self.mtry_, "min_node_size": self.min_node_size_}

    def set_state(self, state):
        self.trees_ = state["trees"]
        self.classes_ = state["classes"]
        self.n_features_ = state["n_features"]
        self.mtry_ = state["mtry"]
        self.min_node_size_ = state["min_node_size"]


class ForestRegressor:
    """Regression forest returning the across-tree mean and variance."""

    def __init__(self, n_trees=50, mtry_power=1.0, min_node_size=3, sample_fraction=1.0, bootstrap=True,
                 random_threshold=True, seed=0):
        self.n_trees = n_trees
        self.mtry_power = mtry_power
        self.min_node_size = min_node_size
        self.sample_fraction = sample_fraction
        self.bootstrap = bootstrap
        self.random_threshold = random_threshold
        self.seed = seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, p = X.shape
        mtry = mtry_from_power(p, self.mtry_power)
        self.trees_ = []
        for child in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(child)
            if self.bootstrap:
                rows = rng.integers(0, n, size=n)
            else:
                rows = np.sort(rng.choice(n, size=max(1, math.ceil(self.sample_fraction * n)), replace=False))
            self.trees_.append(grow_tree(X[rows], y[rows], "mse", self.min_node_size, None, mtry, rng,
                                         random_threshold=self.random_threshold))
        return self

    def predict(self, X, return_var=False):
        X = np.asarray(X, dtype=np.float64)
        per_tree = np.column_stack([t["value"][apply_tree(t, X), 0] for t in self.trees_])
        mean = per_tree.mean(axis=1)
        if return_var:
            return mean, per_tree.var(axis=1)
        return mean
