"""Dynamic time warping with a Sakoe-Chiba band.

Local cost is the squared difference, steps are (1, 0), (0, 1) and (1, 1),
and the reported distance is the square root of the accumulated cost, so
with a zero-width warp DTW reduces to the discretized L2 distance.

The hot loop lives in the compiled ``_dtw_ext`` module. If it is missing,
or ``FDBENCH_NO_EXT`` is set, the numpy fallback in ``_dtw_py`` is used.
Both return bit-identical results.
"""
import math
import os

import numpy as np

from fdbench import _dtw_py

if os.environ.get("FDBENCH_NO_EXT"):
    _ext = None
else:
    try:
        from fdbench import _dtw_ext as _ext
    except ImportError:
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
_BACKENDS = {"python": _dtw_py}
if _ext is not None:
    _BACKENDS["cython"] = _ext


def available_backends():
    return sorted(_BACKENDS)


def _impl(backend):
    if backend is None:
        backend = BACKEND
    try:
        return _BACKENDS[backend]
    except KeyError:
        raise ValueError(f"DTW backend {backend!r} not available; have {available_backends()}") from None


def band_halfwidth(window, length):
    """Half-width of the band for a window given as a fraction of ``length``.

    ``window=1.0`` covers the whole cost matrix; ``window=0`` still keeps one
    off-diagonal so that the band is never empty.
    """
    if not 0.0 <= window <= 1.0:
        raise ValueError(f"window must lie in [0, 1], got {window}")
    return max(1, math.ceil(window * length))


def _effective_band(band, n, m):
    if band is None:
        return max(n, m)
    if band < 0:
        raise ValueError("band half-width must be non-negative")
    # the end cell (n-1, m-1) must stay reachable
    return max(int(band), abs(n - m))


def _as_series(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("a series must be a non-empty 1-D array")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def dtw_cost(a, b, band=None, backend=None):
    """Accumulated DTW cost; ``band=None`` means unconstrained."""
    a, b = _as_series(a), _as_series(b)
    band = _effective_band(band, len(a), len(b))
    cost = _impl(backend).dtw_cost(a, b, band)
    if not math.isfinite(cost):
        raise ValueError("empty band: no admissible warping path")
    return cost


def dtw_distance(a, b, window=1.0, backend=None):
    """DTW distance between two series with band fraction ``window``."""
    band = band_halfwidth(window, max(len(a), len(b)))
    return math.sqrt(dtw_cost(a, b, band=band, backend=backend))


def dtw_pairwise(A, B=None, window=1.0, backend=None):
    """DTW distances between all rows of ``A`` and all rows of ``B``.

    ``B=None`` computes the symmetric matrix of ``A`` against itself.
    """
    A = np.ascontiguousarray(np.atleast_2d(A), dtype=np.float64)
    symmetric = B is None
    B = A if symmetric else np.ascontiguousarray(np.atleast_2d(B), dtype=np.float64)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise ValueError("series contain non-finite values")
    n, m = A.shape[1], B.shape[1]
    band = _effective_band(band_halfwidth(window, max(n, m)), n, m)
    cost = _impl(backend).dtw_cost_matrix(A, B, band, symmetric)
    return np.sqrt(cost)
