"""DTW distances to reference curves drawn from the training rows."""
import math

import numpy as np

from fdbench.dtw import dtw_pairwise
from fdbench.extract.base import Extractor

REF_METHODS = ("random", "all")


def _znorm(X):
    mu = X.mean(axis=1, keepdims=True)
    sd = X.std(axis=1, keepdims=True)
    return (X - mu) / np.where(sd > 0, sd, 1.0)


def extract_dtw_kernel(Xtrain, ref_method="random", n_refs=0.05, window=1.0, seed=0):
    return DTWKernelExtractor(ref_method=ref_method, n_refs=n_refs, window=window, seed=seed).fit_transform(Xtrain)


class DTWKernelExtractor(Extractor):
    """Feature j of a curve is its DTW distance to reference curve j.

    ``ref_method="all"`` uses every training row as a reference, ``"random"``
    samples ``ceil(n_refs * N_train)`` of them without replacement.
    """

    method = "dtwkernel"

    def __init__(self, ref_method="random", n_refs=0.05, window=1.0, seed=0, znorm=False):
        if ref_method not in REF_METHODS:
            raise ValueError(f"ref_method must be one of {REF_METHODS}, got {ref_method!r}")
        if not 0.0 < n_refs <= 1.0:
            raise ValueError(f"n_refs must lie in (0, 1], got {n_refs}")
        if not 0.0 <= window <= 1.0:
            raise ValueError(f"window must lie in [0, 1], got {window}")
        super().__init__(ref_method=ref_method, n_refs=float(n_refs), window=float(window),
                         seed=seed, znorm=bool(znorm))

    def n_references(self, n_train):
        if self.params["ref_method"] == "all":
            return n_train
        return math.ceil(self.params["n_refs"] * n_train)

    def output_width(self, length):
        raise ValueError("output width of dtwkernel depends on the training size")

    def _fit(self, X):
        n = X.shape[0]
        k = self.n_references(n)
        if self.params["ref_method"] == "all":
            self.ref_index_ = np.arange(n)
        else:
            rng = np.random.default_rng(self.params["seed"])
            self.ref_index_ = np.sort(rng.choice(n, size=k, replace=False))
        refs = X[self.ref_index_]
        self.references_ = _znorm(refs) if self.params["znorm"] else refs.copy()

    def _transform(self, X):
        if self.params["znorm"]:
            X = _znorm(X)
        D = dtw_pairwise(X, self.references_, window=self.params["window"])
        return D, [f"ref{i + 1}" for i in range(D.shape[1])], {}
