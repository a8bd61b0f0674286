"""A minimal set of time-series summary features."""
import numpy as np

from fdbench.extract.base import Extractor

TSFEAT_NAMES = ["mean", "sd", "min", "max", "acf1", "acf2", "acf3", "slope"]


def extract_tsfeat(X):
    return TSFeatExtractor().fit_transform(X)


class TSFeatExtractor(Extractor):
    """Mean, sd, min, max, lag 1-3 autocorrelation and linear-trend slope.

    Rows with zero variance get autocorrelations 0; their indices are
    reported in ``flags["zero_variance_rows"]``.
    """

    method = "tsfeat"
    stateless = True

    def output_width(self, length):
        return len(TSFEAT_NAMES)

    def _check(self, X):
        if X.shape[1] < 4:
            raise ValueError("tsfeat needs series of length >= 4")

    def _transform(self, X):
        n, L = X.shape
        mean = X.mean(axis=1)
        centered = X - mean[:, None]
        ss = np.sum(centered ** 2, axis=1)
        flat = ss == 0
        denom = np.where(flat, 1.0, ss)
        acf = [np.where(flat, 0.0, np.sum(centered[:, :-k] * centered[:, k:], axis=1) / denom)
               for k in (1, 2, 3)]
        t = np.arange(L, dtype=np.float64)
        tc = t - t.mean()
        slope = centered @ tc / np.sum(tc ** 2)
        values = np.column_stack([mean, X.std(axis=1, ddof=1), X.min(axis=1), X.max(axis=1), *acf, slope])
        return values, list(TSFEAT_NAMES), {"zero_variance_rows": np.flatnonzero(flat)}
