"""Principal component scores, fitted on training curves only."""
import numpy as np

from fdbench.extract.base import Extractor


def extract_pca(Xtrain, rank=None):
    return PCAExtractor(rank=rank).fit_transform(Xtrain)


class PCAExtractor(Extractor):
    """Project centered curves on the top ``rank`` covariance eigenvectors.

    ``rank=None`` keeps ``min(N_train - 1, L)`` components. Eigenvector signs
    are fixed so that the largest-magnitude entry is positive.
    """

    method = "pca"

    def __init__(self, rank=None):
        if rank is not None and int(rank) < 1:
            raise ValueError("rank must be at least 1")
        super().__init__(rank=None if rank is None else int(rank))

    def output_width(self, length):
        if self.params["rank"] is None:
            raise ValueError("output width of rank=None depends on the training size")
        return self.params["rank"]

    def _check(self, X):
        n, L = X.shape
        limit = min(n - 1, L)
        rank = self.params["rank"]
        if limit < 1 or (rank is not None and rank > limit):
            raise ValueError(f"rank {rank} too large for {n} training curves of length {L} (max {limit})")

    def _fit(self, X):
        n, L = X.shape
        rank = self.params["rank"] or min(n - 1, L)
        self.mean_ = X.mean(axis=0)
        _, s, vt = np.linalg.svd(X - self.mean_, full_matrices=False)
        comps = vt[:rank]
        pivot = np.argmax(np.abs(comps), axis=1)
        comps = comps * np.sign(comps[np.arange(rank), pivot])[:, None]
        self.components_ = comps
        self.explained_variance_ = s[:rank] ** 2 / (n - 1)

    def _transform(self, X):
        scores = (X - self.mean_) @ self.components_.T
        return scores, [f"pc{k + 1}" for k in range(scores.shape[1])], {}

    def inverse_transform(self, scores):
        return np.atleast_2d(scores) @ self.components_ + self.mean_
