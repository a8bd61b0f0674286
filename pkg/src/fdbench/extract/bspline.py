"""B-spline ("bsignal") features.

Feature m of a curve x is the grid-weighted inner product
``(1/L) * sum_t x(t) B_m(t)`` with a cubic B-spline basis on an open uniform
knot vector. The effective degrees of freedom ``df`` shrink the curve first:
x is replaced by its penalized spline smooth ``H x`` with
``H = B (B'B + lam P)^-1 B'`` and a first-order difference penalty ``P``;
``lam`` is chosen so that ``trace(H) = df``. For ``lam = 0`` this is exact
projection and the features reduce to ``(1/L) B'x``.
"""
import math

import numpy as np
from scipy.interpolate import BSpline

from fdbench.extract.base import Extractor

DEGREE = 3


def knot_vector(lower, upper, n_knots, degree=DEGREE):
    """Open uniform knot vector with ``n_knots`` interior knots."""
    interior = np.linspace(lower, upper, n_knots + 2)[1:-1]
    return np.concatenate([np.full(degree + 1, float(lower)), interior, np.full(degree + 1, float(upper))])


def bspline_basis(grid, n_knots, degree=DEGREE):
    """Design matrix (len(grid) x (n_knots + degree + 1)) of the B-spline basis."""
    grid = np.asarray(grid, dtype=np.float64)
    t = knot_vector(grid[0], grid[-1], n_knots, degree)
    return BSpline.design_matrix(grid, t, degree).toarray()


def difference_penalty(n_basis, order=1):
    D = np.diff(np.eye(n_basis), n=order, axis=0)
    return D.T @ D


def _generalized_eigs(B, P):
    # eigenvalues mu of B'B relative to M = B'B + P, all in [0, 1]
    BtB = B.T @ B
    R = np.linalg.cholesky(BtB + P)
    Rinv = np.linalg.inv(R)
    mu = np.linalg.eigvalsh(Rinv @ BtB @ Rinv.T)
    return np.clip(mu, 0.0, 1.0)


def _trace_from_eigs(mu, lam):
    if lam == 0.0:
        return float(np.sum(mu > 1e-10))
    return float(np.sum(mu / (mu + lam * (1.0 - mu))))


def smoother_trace(B, P, lam):
    """Effective degrees of freedom ``trace(H_lam)`` of the penalized smoother."""
    return _trace_from_eigs(_generalized_eigs(B, P), lam)


def lambda_for_df(B, P, df, tol=1e-8, max_iter=200):
    """Penalty giving ``trace(H) = df`` by bisection on log(lam).

    ``df`` at or above the rank of ``B`` gives ``lam = 0``; ``df`` at the
    penalty null-space dimension is only reached in the limit and returns
    the largest bracket value.
    """
    mu = _generalized_eigs(B, P)
    if df >= _trace_from_eigs(mu, 0.0):
        return 0.0
    lo, hi = -30.0, 30.0
    if _trace_from_eigs(mu, math.exp(hi)) >= df:
        return math.exp(hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        tr = _trace_from_eigs(mu, math.exp(mid))
        if abs(tr - df) < tol:
            break
        if tr > df:
            lo = mid
        else:
            hi = mid
    return math.exp(mid)


def extract_bsignal(X, knots=10, df=3, grid=None):
    return BsignalExtractor(knots=knots, df=df).fit_transform(X, grid)


class BsignalExtractor(Extractor):
    method = "bsignal"
    stateless = True

    def __init__(self, knots=10, df=3):
        if int(knots) < 3:
            raise ValueError("bsignal needs at least 3 knots")
        if df is not None and df < 1:
            raise ValueError("df must be at least 1")
        super().__init__(knots=int(knots), df=df)

    def output_width(self, length):
        return self.params["knots"] + DEGREE + 1

    def _check(self, X):
        if self.params["knots"] > X.shape[1] - 1:
            raise ValueError(f"{self.params['knots']} knots exceed L - 1 = {X.shape[1] - 1}")

    def _fit(self, X):
        L = X.shape[1]
        B = bspline_basis(self.grid_, self.params["knots"])
        P = difference_penalty(B.shape[1])
        df = self.params["df"]
        self.lam_ = 0.0 if df is None else lambda_for_df(B, P, df)
        self.basis_ = B
        self.penalty_ = P
        if self.lam_ == 0.0:
            self.weights_ = B / L
        else:
            hat = B @ np.linalg.solve(B.T @ B + self.lam_ * P, B.T)
            self.weights_ = hat @ B / L

    def _transform(self, X):
        names = [f"b{m + 1}" for m in range(self.weights_.shape[1])]
        return X @ self.weights_, names, {}

    def reconstruct(self, features):
        """Curves implied by features: ``B (B'B + lam P)^+ L f``."""
        features = np.atleast_2d(features)
        B = self.basis_
        G = B.T @ B + self.lam_ * self.penalty_
        coef = np.linalg.pinv(G) @ (self.length_ * features.T)
        return (B @ coef).T
