"""Extractor protocol and the feature block it produces."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NotFittedError(RuntimeError):
    pass


@dataclass
class FeatureBlock:
    names: list
    values: np.ndarray
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError(f"{len(self.names)} names for a block of shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature block contains non-finite values")

    @property
    def width(self):
        return len(self.names)


def as_curves(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError("curves must be an N x L matrix")
    if not np.all(np.isfinite(X)):
        raise ValueError("curves contain non-finite values")
    return X


class Extractor:
    """Fit on training curves, then transform any curves.

    Subclasses implement ``_fit`` (learned state from training rows only)
    and ``_transform``; stateless methods leave ``_fit`` empty. ``fit``
    records the curve length, and ``transform`` rejects other lengths so the
    output width stays fixed.
    """

    method = None
    stateless = False

    def __init__(self, **params):
        self.params = params
        self.length_ = None
        self.grid_ = None

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"

    @property
    def fitted(self):
        return self.length_ is not None

    def fit(self, X, grid=None):
        X = as_curves(X)
        L = X.shape[1]
        self.grid_ = np.arange(1.0, L + 1) if grid is None else np.asarray(grid, dtype=np.float64)
        if self.grid_.shape != (L,):
            raise ValueError("grid length does not match the curves")
        self._check(X)
        self._fit(X)
        self.length_ = L
        return self

    def transform(self, X, prefix=""):
        if not self.fitted:
            raise NotFittedError(f"{self.method} extractor used before fit")
        X = as_curves(X)
        if X.shape[1] != self.length_:
            raise ValueError(f"extractor fitted on length {self.length_}, got {X.shape[1]}")
        values, names, flags = self._transform(X)
        return FeatureBlock([f"{prefix}{n}" for n in names], values, flags)

    def fit_transform(self, X, grid=None, prefix=""):
        return self.fit(X, grid).transform(X, prefix)

    def output_width(self, length):
        """Width of the output for curves of ``length`` (needs no data)."""
        raise NotImplementedError

    def _check(self, X):
        pass

    def _fit(self, X):
        pass

    def _transform(self, X):
        raise NotImplementedError


class RawExtractor(Extractor):
    """Pass curves through unchanged (the "none" / flattened pipeline)."""

    method = "raw"
    stateless = True

    def output_width(self, length):
        return length

    def _transform(self, X):
        return X.copy(), [str(i + 1) for i in range(X.shape[1])], {}
