# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled RIM recursion kernels.

Both kernels take features laid out as (batch, time, channel) and interpolation
coefficients as (batch, time - 1). A zero coefficient passes the raw feature
through untouched.
"""
import numpy as np


def rim_forward(const double[:, :, ::1] x, const double[:, ::1] lam):
    cdef Py_ssize_t n = x.shape[0], T = x.shape[1], C = x.shape[2]
    cdef Py_ssize_t a, i, c
    cdef double l
    out = np.empty((n, T, C), dtype=np.float64)
    cdef double[:, :, ::1] o = out
    with nogil:
        for a in range(n):
            for c in range(C):
                o[a, 0, c] = x[a, 0, c]
            for i in range(1, T):
                l = lam[a, i - 1]
                if l == 0.0:
                    for c in range(C):
                        o[a, i, c] = x[a, i, c]
                else:
                    for c in range(C):
                        o[a, i, c] = (1.0 - l) * x[a, i, c] + l * o[a, i - 1, c]
    return out


def rim_forward_shared(const double[:, ::1] x, const double[:, ::1] lam):
    """One series (time, channel) augmented under every row of ``lam``."""
    cdef Py_ssize_t n = lam.shape[0], T = x.shape[0], C = x.shape[1]
    cdef Py_ssize_t a, i, c
    cdef double l
    out = np.empty((n, T, C), dtype=np.float64)
    cdef double[:, :, ::1] o = out
    with nogil:
        for a in range(n):
            for c in range(C):
                o[a, 0, c] = x[0, c]
            for i in range(1, T):
                l = lam[a, i - 1]
                if l == 0.0:
                    for c in range(C):
                        o[a, i, c] = x[i, c]
                else:
                    for c in range(C):
                        o[a, i, c] = (1.0 - l) * x[i, c] + l * o[a, i - 1, c]
    return out
