# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for H^j_J applied to step functions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport isnan

cnp.import_array()


cdef inline double _ipow(double x, int j) nogil:
    cdef double r = 1.0
    cdef int k
    for k in range(j):
        r *= x
    return r


cdef inline double _pos(double x) nogil:
    # (x)_+ with nan (inf - inf) mapped to 0
    if isnan(x) or x <= 0.0:
        return 0.0
    return x


cdef double _factorial(int j):
    cdef double r = 1.0
    cdef int k
    for k in range(2, j + 1):
        r *= k
    return r


def hardy_sum(lam_t, lam_lo, lam_hi, values, int j):
    cdef const double[::1] lt = np.ascontiguousarray(lam_t, dtype=np.float64)
    cdef const double[::1] llo = np.ascontiguousarray(lam_lo, dtype=np.float64)
    cdef const double[::1] lhi = np.ascontiguousarray(lam_hi, dtype=np.float64)
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t nt = lt.shape[0], nc = v.shape[0], i, c
    out = np.zeros(nt, dtype=np.float64)
    cdef double[::1] o = out
    cdef double acc, x, a, b
    cdef double fact = _factorial(j)
    with nogil:
        for i in range(nt):
            acc = 0.0
            x = lt[i]
            for c in range(nc):
                if v[c] == 0.0:
                    continue
                a = _pos(x - lhi[c])
                if a == 0.0:
                    continue
                b = _pos(x - llo[c])
                acc += v[c] * (_ipow(a, j) - _ipow(b, j))
            o[i] = acc / fact
    return out


def kernel_matrix(lam_t, lam_lo, lam_hi, int j):
    """(ncells, nt) matrix of per-cell contributions for a unit value."""
    cdef const double[::1] lt = np.ascontiguousarray(lam_t, dtype=np.float64)
    cdef const double[::1] llo = np.ascontiguousarray(lam_lo, dtype=np.float64)
    cdef const double[::1] lhi = np.ascontiguousarray(lam_hi, dtype=np.float64)
    cdef Py_ssize_t nc = llo.shape[0], nt = lt.shape[0], i, c
    out = np.zeros((nc, nt), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double a, b
    cdef double fact = _factorial(j)
    with nogil:
        for c in range(nc):
            for i in range(nt):
                a = _pos(lt[i] - lhi[c])
                if a == 0.0:
                    continue
                b = _pos(lt[i] - llo[c])
                o[c, i] = (_ipow(a, j) - _ipow(b, j)) / fact
    return out


def hardy_sum_batch(lam_t, lam_lo, lam_hi, values, int j):
    # the contraction over cells goes to BLAS
    k = kernel_matrix(lam_t, lam_lo, lam_hi, j)
    return np.ascontiguousarray(values, dtype=np.float64) @ k
