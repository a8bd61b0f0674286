"""Numpy fallback for the banded DTW kernels.

The pairwise routine vectorizes over pairs: the dynamic program walks the
cells of the band in Python and updates every pair at once. Arithmetic
matches ``_dtw_ext`` exactly.
"""
import numpy as np

# pairs per block; bounds the (m + 1) x pairs work arrays
_BLOCK = 4096


def dtw_cost(a, b, band):
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    n, m = len(a), len(b)
    inf = float("inf")
    prev = [0.0] + [inf] * m
    curr = [inf] * (m + 1)
    for i in range(n):
        lo = max(0, i - band)
        hi = min(m - 1, i + band)
        curr[lo] = inf
        ai = a[i]
        for j in range(lo, hi + 1):
            d = ai - b[j]
            best = prev[j]
            if prev[j + 1] < best:
                best = prev[j + 1]
            if curr[j] < best:
                best = curr[j]
            curr[j + 1] = d * d + best
        if hi + 2 <= m:
            curr[hi + 2] = inf
        prev, curr = curr, prev
    return prev[m]


def _block_cost(X, Y, band):
    # X: n x P, Y: m x P (one column per pair)
    n, P = X.shape
    m = Y.shape[0]
    prev = np.full((m + 1, P), np.inf)
    prev[0] = 0.0
    curr = np.full((m + 1, P), np.inf)
    best = np.empty(P)
    for i in range(n):
        lo = max(0, i - band)
        hi = min(m - 1, i + band)
        d = X[i] - Y[lo:hi + 1]
        cost = d * d
        diag_up = np.minimum(prev[lo:hi + 1], prev[lo + 1:hi + 2])
        curr[lo] = np.inf
        for k, j in enumerate(range(lo, hi + 1)):
            np.minimum(diag_up[k], curr[j], out=best)
            np.add(cost[k], best, out=curr[j + 1])
        if hi + 2 <= m:
            curr[hi + 2] = np.inf
        prev, curr = curr, prev
    return prev[m].copy()


def dtw_cost_matrix(A, B, band, symmetric=False):
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    na, nb = A.shape[0], B.shape[0]
    if symmetric:
        ii, jj = np.triu_indices(na, k=1)
    else:
        ii, jj = np.divmod(np.arange(na * nb), nb)
    out = np.zeros((na, nb))
    for s in range(0, len(ii), _BLOCK):
        bi, bj = ii[s:s + _BLOCK], jj[s:s + _BLOCK]
        vals = _block_cost(A[bi].T.copy(), B[bj].T.copy(), band)
        out[bi, bj] = vals
        if symmetric:
            out[bj, bi] = vals
    return out
