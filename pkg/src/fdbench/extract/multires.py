"""Window means over a pyramid of resolutions."""
import math

import numpy as np

from fdbench.extract.base import Extractor


def multires_windows(length, res_level, shift):
    """(start, width) of every window, coarsest level first.

    Level r uses width ``ceil(L / 2^r)`` and step ``ceil(shift * width)``;
    windows are kept while they lie fully inside the series.
    """
    out = []
    for r in range(res_level + 1):
        width = math.ceil(length / 2 ** r)
        step = math.ceil(shift * width)
        out += [(s, width) for s in range(0, length - width + 1, step)]
    return out


def extract_multires(X, res_level=3, shift=0.5, variance=False):
    return MultiResExtractor(res_level=res_level, shift=shift, variance=variance).fit_transform(X)


class MultiResExtractor(Extractor):
    method = "multires"
    stateless = True

    def __init__(self, res_level=3, shift=0.5, variance=False):
        if int(res_level) < 1:
            raise ValueError("res_level must be at least 1")
        if not 0.0 < shift <= 1.0:
            raise ValueError(f"shift must lie in (0, 1], got {shift}")
        super().__init__(res_level=int(res_level), shift=float(shift), variance=bool(variance))

    def output_width(self, length):
        n = len(multires_windows(length, self.params["res_level"], self.params["shift"]))
        return 2 * n if self.params["variance"] else n

    def _check(self, X):
        if X.shape[1] < 2 ** self.params["res_level"]:
            raise ValueError(f"series length {X.shape[1]} < 2^res_level = {2 ** self.params['res_level']}")

    def _transform(self, X):
        wins = multires_windows(X.shape[1], self.params["res_level"], self.params["shift"])
        csum = np.concatenate([np.zeros((X.shape[0], 1)), np.cumsum(X, axis=1)], axis=1)
        starts = np.array([s for s, _ in wins])
        widths = np.array([w for _, w in wins])
        means = (csum[:, starts + widths] - csum[:, starts]) / widths
        names = [f"mean.w{w}.s{s}" for s, w in wins]
        if not self.params["variance"]:
            return means, names, {}
        var = np.column_stack([X[:, s:s + w].var(axis=1) for s, w in wins])
        return np.hstack([means, var]), names + [f"var.w{w}.s{s}" for s, w in wins], {}
