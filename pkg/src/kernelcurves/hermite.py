"""Normalized probabilist's Hermite polynomials, 1D and multivariate.

h_k(x) = He_k(x) / sqrt(k!), with He the probabilist's convention obeying
He_{k+1} = x He_k - k He_{k-1}. Multivariate polynomials are products over a
sparse multi-index of 1D polynomials in PCA-rescaled coordinates
z = Gamma^{-1/2} U^T x.

Hot loops dispatch to a compiled extension when available; set
KERNELCURVES_BACKEND=python to force the numpy fallback.
"""

import os
from dataclasses import dataclass, field

import numpy as np

if os.environ.get("KERNELCURVES_BACKEND", "").lower() == "python":
    from . import _fastpoly_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _fastpoly as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _fastpoly_py as _impl

        BACKEND = "python"


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Sparse multi-index: tuple of (dimension, order) pairs, orders >= 1."""

    entries: tuple = field(default=())

    def __post_init__(self):
        entries = tuple(sorted((int(d), int(k)) for d, k in self.entries))
        object.__setattr__(self, "entries", entries)
        dims = [d for d, _ in entries]
        if len(set(dims)) != len(dims):
            raise ValueError("duplicate dimension in multi-index")
        if any(d < 0 for d in dims):
            raise ValueError("negative dimension index")
        if any(k < 1 for _, k in entries):
            raise ValueError("orders in the sparse map must be >= 1")

    @property
    def degree(self):
        return sum(k for _, k in self.entries)

    @classmethod
    def from_dense(cls, alpha):
        return cls(tuple((d, int(k)) for d, k in enumerate(alpha) if k))

    def to_dense(self, d):
        alpha = np.zeros(d, dtype=np.int64)
        for dim, k in self.entries:
            alpha[dim] = k
        return alpha

    def to_dict(self):
        return {str(d): k for d, k in self.entries}

    @classmethod
    def from_dict(cls, mapping):
        return cls(tuple((int(d), int(k)) for d, k in mapping.items()))


def hermite_1d(k, x):
    """Evaluate h_k at x (scalar or array)."""
    if k < 0:
        raise ValueError("order must be nonnegative")
    x_arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    table = _impl.hermite_table(x_arr.ravel(), k)
    out = table[:, k].reshape(x_arr.shape)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out[0])
    return out


def hermite_table(x, kmax):
    """(N, kmax+1) table of h_0..h_kmax at the points x."""
    return _impl.hermite_table(np.asarray(x, dtype=np.float64), kmax)


def pca_coordinates(spectrum, X):
    """Map samples to z = Gamma^{-1/2} U^T x; zero-variance coordinates -> 0."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != spectrum.dim:
        raise ValueError(
            f"dimension mismatch: data has {X.shape[1]} columns, "
            f"spectrum has {spectrum.dim}"
        )
    Z = X @ spectrum.directions
    gammas = spectrum.eigenvalues
    positive = gammas > 0
    Z[:, positive] /= np.sqrt(gammas[positive])
    Z[:, ~positive] = 0.0
    return Z


def multi_hermite(alpha, Z):
    """Evaluate the product polynomial h_alpha on rows of Z (PCA coordinates)."""
    Z = np.asarray(Z, dtype=np.float64)
    if alpha.entries and alpha.entries[-1][0] >= Z.shape[1]:
        raise ValueError("multi-index dimension out of range")
    out = np.ones(Z.shape[0])
    for dim, order in alpha.entries:
        out *= hermite_1d(order, Z[:, dim])
    return out


def design_matrix(modes, Z):
    """N x P matrix with column p = multi_hermite(modes[p], Z)."""
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    if any(m.entries and m.entries[-1][0] >= Z.shape[1] for m in modes):
        raise ValueError("multi-index dimension out of range")
    dims, orders, ptr = [], [], [0]
    for m in modes:
        for d, k in m.entries:
            dims.append(d)
            orders.append(k)
        ptr.append(len(dims))
    return _impl.design_matrix(
        Z,
        np.asarray(dims, dtype=np.int64),
        np.asarray(orders, dtype=np.int64),
        np.asarray(ptr, dtype=np.int64),
    )
