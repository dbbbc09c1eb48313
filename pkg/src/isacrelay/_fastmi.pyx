# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled entropy / conditional mutual-information reduction kernels.

Mirrors the signatures in ``_mi_numpy``; selected at import by ``backend``.
"""

from libc.math cimport log2

import numpy as np


def entropy_bits(p):
    cdef const double[::1] q = np.ascontiguousarray(p, dtype=np.float64).ravel()
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(q.shape[0]):
        if q[i] > 0.0:
            acc -= q[i] * log2(q[i])
    return acc


def cond_mi_bits(p):
    cdef const double[:, :, ::1] t = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t nc = t.shape[0], na = t.shape[1], nb = t.shape[2]
    cdef double[::1] pa = np.empty(na)
    cdef double[::1] pb = np.empty(nb)
    cdef double acc = 0.0, pc, v
    cdef Py_ssize_t c, a, b
    for c in range(nc):
        pc = 0.0
        for a in range(na):
            pa[a] = 0.0
        for b in range(nb):
            pb[b] = 0.0
        for a in range(na):
            for b in range(nb):
                v = t[c, a, b]
                pa[a] += v
                pb[b] += v
                pc += v
        if pc <= 0.0:
            continue
        for a in range(na):
            if pa[a] <= 0.0:
                continue
            for b in range(nb):
                v = t[c, a, b]
                if v > 0.0:
                    acc += v * log2(v * pc / (pa[a] * pb[b]))
    return acc
