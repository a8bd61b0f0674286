"""Nonparametric functional classifiers: k-nearest neighbors and kernel voting."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from fdbench.dtw import dtw_pairwise
from fdbench.learn.base import Learner, vote

SEMIMETRICS = ("euclidean", "dtw")


@dataclass(frozen=True)
class Semimetric:
    """Distance between curves.

    ``euclidean`` is the discretized L2 distance; ``dtw`` the banded DTW
    distance with band fraction ``window``.
    """

    kind: str = "euclidean"
    window: float = 1.0

    def __post_init__(self):
        if self.kind not in SEMIMETRICS:
            raise ValueError(f"unknown semimetric {self.kind!r}; known: {SEMIMETRICS}")
        if not 0.0 <= self.window <= 1.0:
            raise ValueError(f"window must lie in [0, 1], got {self.window}")

    def pairwise(self, A, B=None):
        if self.kind == "dtw":
            return dtw_pairwise(A, B, window=self.window)
        return cdist(A, A if B is None else B)


def _semimetric(metric, window):
    if isinstance(metric, Semimetric):
        return metric
    return Semimetric(metric, window)


class KNNClassifier(Learner):
    """Unweighted k-nearest-neighbor vote under a semimetric.

    Distance ties go to the lower training index; vote ties to the class
    with the smaller summed neighbor distance, then the lower label.
    """

    method = "knn"

    def __init__(self, k=1, metric="euclidean", window=1.0):
        if int(k) < 1:
            raise ValueError("k must be at least 1")
        self.metric = _semimetric(metric, window)
        super().__init__(k=int(k), metric=self.metric.kind, window=self.metric.window)

    def fit(self, X, y):
        X = self._check_X(X)
        y = np.asarray(y, dtype=np.intp)
        if self.params["k"] > len(y):
            raise ValueError(f"k={self.params['k']} exceeds the {len(y)} training rows")
        self.X_ = X.copy()
        self.y_ = y.copy()
        self.classes_ = np.unique(y)
        self.n_features_ = X.shape[1]
        return self

    def predict(self, X):
        self._check_fitted()
        X = self._check_X(X)
        return self.predict_from_distances(self.metric.pairwise(X, self.X_))

    def predict_from_distances(self, D):
        """Predict from a query x train distance matrix."""
        k = self.params["k"]
        nn = np.argsort(D, axis=1, kind="stable")[:, :k]
        nn_labels = self.y_[nn]
        nn_dist = np.take_along_axis(D, nn, axis=1)
        n_classes = int(self.classes_.max()) + 1
        summed = np.zeros((D.shape[0], n_classes))
        np.add.at(summed, (np.arange(D.shape[0])[:, None], nn_labels), nn_dist)
        return vote(nn_labels, n_classes, tiebreak=summed)

    def get_state(self):
        return {"X": self.X_, "y": self.y_}

    def set_state(self, state):
        self.fit(state["X"], state["y"])


class KernelNPClassifier(Learner):
    """Gaussian-kernel class scores ``sum_i exp(-(d(x, x_i)/h)^2 / 2)``.

    Predicts the class with the largest score; if every weight underflows
    to zero the 1-NN label is used.
    """

    method = "kernel_np"

    def __init__(self, bandwidth=1.0, metric="euclidean", window=1.0):
        if not bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        self.metric = _semimetric(metric, window)
        super().__init__(bandwidth=float(bandwidth), metric=self.metric.kind, window=self.metric.window)

    def fit(self, X, y):
        X = self._check_X(X)
        self.X_ = X.copy()
        self.y_ = np.asarray(y, dtype=np.intp).copy()
        self.classes_ = np.unique(self.y_)
        self.n_features_ = X.shape[1]
        return self

    def scores_from_distances(self, D):
        u = D / self.params["bandwidth"]
        W = np.exp(-0.5 * u * u)
        onehot = np.zeros((len(self.y_), int(self.classes_.max()) + 1))
        onehot[np.arange(len(self.y_)), self.y_] = 1.0
        return W @ onehot

    def decision_scores(self, X):
        self._check_fitted()
        return self.scores_from_distances(self.metric.pairwise(self._check_X(X), self.X_))

    def predict(self, X):
        self._check_fitted()
        return self.predict_from_distances(self.metric.pairwise(self._check_X(X), self.X_))

    def predict_from_distances(self, D):
        scores = self.scores_from_distances(D)
        pred = np.argmax(scores, axis=1)
        dead = scores.max(axis=1) == 0.0
        if np.any(dead):
            nearest = np.argmin(D[dead], axis=1)
            pred[dead] = self.y_[nearest]
        return pred

    def get_state(self):
        return {"X": self.X_, "y": self.y_}

    def set_state(self, state):
        self.fit(state["X"], state["y"])
