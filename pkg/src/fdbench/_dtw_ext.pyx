# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled banded DTW kernels.

Must produce bit-identical results to ``fdbench._dtw_py``: same local cost
``(a - b) * (a - b)``, same recurrence, no fast-math.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc

cnp.import_array()


cdef inline double _min3(double x, double y, double z) noexcept nogil:
    if y < x:
        x = y
    if z < x:
        x = z
    return x


cdef double _banded_cost(const double* a, Py_ssize_t n,
                         const double* b, Py_ssize_t m,
                         Py_ssize_t band, double* prev, double* curr) noexcept nogil:
    # prev/curr hold m + 1 cells; cell j + 1 is column j, cell 0 the left border
    cdef Py_ssize_t i, j, lo, hi
    cdef double d, ai
    cdef double* tmp

    prev[0] = 0.0
    for j in range(1, m + 1):
        prev[j] = INFINITY
    for i in range(n):
        lo = i - band
        if lo < 0:
            lo = 0
        hi = i + band
        if hi > m - 1:
            hi = m - 1
        curr[lo] = INFINITY
        ai = a[i]
        for j in range(lo, hi + 1):
            d = ai - b[j]
            curr[j + 1] = d * d + _min3(prev[j], prev[j + 1], curr[j])
        if hi + 2 <= m:
            curr[hi + 2] = INFINITY
        tmp = prev
        prev = curr
        curr = tmp
    return prev[m]


def dtw_cost(const double[::1] a, const double[::1] b, Py_ssize_t band):
    """Accumulated squared-difference DTW cost of two series."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0]
    cdef double out
    cdef double* buf = <double*> malloc(2 * (m + 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            out = _banded_cost(&a[0], n, &b[0], m, band, buf, buf + m + 1)
    finally:
        free(buf)
    return out


def dtw_cost_matrix(const double[:, ::1] A, const double[:, ::1] B,
                    Py_ssize_t band, bint symmetric=False):
    """All-pairs accumulated DTW cost between the rows of ``A`` and ``B``.

    With ``symmetric`` the caller guarantees ``A is B``; only the upper
    triangle is computed and mirrored.
    """
    cdef Py_ssize_t na = A.shape[0], nb = B.shape[0]
    cdef Py_ssize_t n = A.shape[1], m = B.shape[1]
    cdef Py_ssize_t i, j, start
    out_arr = np.zeros((na, nb), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double* buf = <double*> malloc(2 * (m + 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(na):
                start = i + 1 if symmetric else 0
                for j in range(start, nb):
                    out[i, j] = _banded_cost(&A[i, 0], n, &B[j, 0], m, band,
                                             buf, buf + m + 1)
                    if symmetric:
                        out[j, i] = out[i, j]
    finally:
        free(buf)
    return out_arr
