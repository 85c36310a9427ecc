"""Pure-numpy fallback for the compiled polynomial kernels in _fastpoly."""

import numpy as np


def hermite_table(x, kmax):
    """Table of normalized probabilist's Hermite values h_0..h_kmax at x.

    Runs the three-term recurrence on the unnormalized He_k and divides each
    column by sqrt(k!). Returns an (len(x), kmax+1) array.
    """
    x = np.asarray(x, dtype=np.float64)
    table = np.empty((x.shape[0], kmax + 1))
    table[:, 0] = 1.0
    if kmax >= 1:
        table[:, 1] = x
    prev = np.ones_like(x)
    cur = x.copy()
    prev_fact = 1.0
    for k in range(1, kmax):
        prev, cur = cur, x * cur - k * prev
        prev_fact *= k + 1
        table[:, k + 1] = cur / np.sqrt(prev_fact)
    return table


def design_matrix(Z, mode_dims, mode_orders, mode_ptr):
    """Assemble the multivariate Hermite design matrix.

    Mode p has sparse entries (mode_dims[j], mode_orders[j]) for j in
    [mode_ptr[p], mode_ptr[p+1]); its column is the product over entries of
    h_order(Z[:, dim]).
    """
    Z = np.asarray(Z, dtype=np.float64)
    N = Z.shape[0]
    P = len(mode_ptr) - 1
    max_order = {}
    for dim, order in zip(mode_dims, mode_orders):
        max_order[dim] = max(order, max_order.get(dim, 0))
    tables = {dim: hermite_table(Z[:, dim], k) for dim, k in max_order.items()}
    H = np.ones((N, P))
    for p in range(P):
        for j in range(mode_ptr[p], mode_ptr[p + 1]):
            H[:, p] *= tables[mode_dims[j]][:, mode_orders[j]]
    return H
