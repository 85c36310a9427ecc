# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for Hermite tables and design-matrix assembly.

Same API and same floating-point algorithm as _fastpoly_py (unnormalized
three-term recurrence, then division by sqrt(k!)), so the two backends agree
bit-for-bit on the recurrence path.
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def hermite_table(x, int kmax):
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = x
    cdef Py_ssize_t N = xv.shape[0]
    out = np.empty((N, kmax + 1))
    cdef double[:, ::1] t = out
    cdef double[::1] inv_norm = _inv_sqrt_factorials(kmax)
    cdef Py_ssize_t i
    cdef int k
    cdef double prev, cur, nxt, xi
    for i in range(N):
        xi = xv[i]
        t[i, 0] = 1.0
        if kmax >= 1:
            t[i, 1] = xi
        prev = 1.0
        cur = xi
        for k in range(1, kmax):
            nxt = xi * cur - k * prev
            prev = cur
            cur = nxt
            t[i, k + 1] = cur * inv_norm[k + 1]
    return out


cdef double[::1] _inv_sqrt_factorials(int kmax):
    cdef double[::1] inv = np.empty(kmax + 1)
    cdef int k
    cdef double fact = 1.0
    inv[0] = 1.0
    for k in range(1, kmax + 1):
        fact *= k
        inv[k] = 1.0 / sqrt(fact)
    return inv


def design_matrix(Z, mode_dims, mode_orders, mode_ptr):
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    cdef double[:, ::1] Zv = Z
    cdef cnp.int64_t[::1] dims = np.ascontiguousarray(mode_dims, dtype=np.int64)
    cdef cnp.int64_t[::1] orders = np.ascontiguousarray(mode_orders, dtype=np.int64)
    cdef cnp.int64_t[::1] ptr = np.ascontiguousarray(mode_ptr, dtype=np.int64)
    cdef Py_ssize_t N = Zv.shape[0]
    cdef Py_ssize_t P = ptr.shape[0] - 1
    cdef Py_ssize_t j, p, i

    # per-dimension Hermite tables up to the maximum order used
    cdef dict tables = {}
    cdef dict max_order = {}
    for j in range(dims.shape[0]):
        key = dims[j]
        if orders[j] > max_order.get(key, 0):
            max_order[key] = orders[j]
    for key, kmax in max_order.items():
        tables[key] = hermite_table(Z[:, key], kmax)

    out = np.ones((N, P))
    cdef double[:, ::1] H = out
    cdef double[:, ::1] tab
    cdef cnp.int64_t order
    for p in range(P):
        for j in range(ptr[p], ptr[p + 1]):
            tab = tables[dims[j]]
            order = orders[j]
            for i in range(N):
                H[i, p] *= tab[i, order]
    return out
