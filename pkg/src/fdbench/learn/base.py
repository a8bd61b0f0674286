"""Learner protocol and JSON serialization of fitted models."""
import json

import numpy as np

from fdbench.extract.base import NotFittedError


def _to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        return {"__ndarray__": obj.tolist(), "dtype": str(obj.dtype)}
    if isinstance(obj, dict):
        return {k: _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _from_jsonable(obj):
    if isinstance(obj, dict):
        if "__ndarray__" in obj:
            return np.array(obj["__ndarray__"], dtype=obj["dtype"])
        return {k: _from_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_from_jsonable(v) for v in obj]
    return obj


class Learner:
    """Classifier on an N x M matrix (scalar features or raw curves).

    Labels are integer codes; ties between labels are broken towards the
    smaller code.
    """

    method = None

    def __init__(self, **params):
        self.params = params

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"

    @property
    def fitted(self):
        return hasattr(self, "classes_")

    def _check_fitted(self):
        if not self.fitted:
            raise NotFittedError(f"{self.method} learner used before fit")

    def _check_X(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("expected an N x M feature matrix")
        if self.fitted and X.shape[1] != self.n_features_:
            raise ValueError(f"learner fitted on {self.n_features_} features, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain non-finite values")
        return X

    def fit(self, X, y):
        raise NotImplementedError

    def predict(self, X):
        raise NotImplementedError

    def get_state(self):
        raise NotImplementedError

    def set_state(self, state):
        raise NotImplementedError

    def to_json(self):
        self._check_fitted()
        doc = {"method": self.method, "params": self.params, "state": self.get_state()}
        return json.dumps(_to_jsonable(doc))


def learner_from_json(text):
    from fdbench.learn import make_learner

    doc = _from_jsonable(json.loads(text))
    model = make_learner(doc["method"], **doc["params"])
    model.set_state(doc["state"])
    return model


def vote(labels, n_classes, tiebreak=None):
    """Majority label per row of ``labels``; ties go to the smallest ``tiebreak``
    value (if given), then to the lower label."""
    counts = np.zeros((labels.shape[0], n_classes), dtype=np.int64)
    np.add.at(counts, (np.arange(labels.shape[0])[:, None], labels), 1)
    best = counts.max(axis=1, keepdims=True)
    tied = counts == best
    if tiebreak is None:
        return np.argmax(tied, axis=1)
    key = np.where(tied, tiebreak, np.inf)
    return np.argmin(key, axis=1)
