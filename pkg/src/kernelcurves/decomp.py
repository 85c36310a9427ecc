"""Target decomposition: recover eigencoefficients of a label vector.

Two methods over the same degree-major Hermite design matrix H (N x P):

- greedy residual fitting (grf): project the running residual onto each
  column in order and subtract;
- gram_schmidt: orthonormalize the columns (QR with a positive-diagonal R)
  and read the coefficients off the orthonormal basis.

Coefficients are reported on the per-sample power scale: v_p^2 estimates the
share of E[y^2] carried by mode p, and the leftover noise_power makes
sum v_p^2 + noise_power = ||y||^2 / N (Pythagorean conservation).
"""

import json
from dataclasses import dataclass

import numpy as np

from .eigensystem import degree_major_ordering, evaluate_modes


@dataclass
class TargetDecomposition:
    modes: list  # MultiIndex, degree-major order
    coefficients: np.ndarray
    noise_power: float
    method: str
    sample_count: int

    def to_dict(self):
        return {
            "method": self.method,
            "sample_count": self.sample_count,
            "noise_power": self.noise_power,
            "modes": [
                {"alpha": alpha.to_dict(), "v_hat": float(v)}
                for alpha, v in zip(self.modes, self.coefficients)
            ],
        }

    def dump_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)


def _check_inputs(y, H):
    y = np.asarray(y, dtype=np.float64).ravel()
    H = np.asarray(H, dtype=np.float64)
    if H.shape[0] != y.shape[0]:
        raise ValueError("label count must match design-matrix rows")
    return y, H


def grf(y, H, modes=None):
    """Greedy residual fitting in column order."""
    y, H = _check_inputs(y, H)
    N, P = H.shape
    norms_sq = np.sum(H**2, axis=0)
    zero = np.flatnonzero(norms_sq == 0.0)
    if zero.size:
        raise ValueError(f"zero design column for mode index {zero[0]}")
    resid = y.copy()
    v = np.empty(P)
    for p in range(P):
        raw = float(H[:, p] @ resid) / norms_sq[p]
        resid -= raw * H[:, p]
        v[p] = raw * np.sqrt(norms_sq[p] / N)
    noise = float(resid @ resid) / N
    return TargetDecomposition(
        modes=list(modes) if modes is not None else list(range(P)),
        coefficients=v,
        noise_power=noise,
        method="grf",
        sample_count=N,
    )


def gram_schmidt_decompose(y, H, modes=None):
    """Coefficients on the orthonormalized (QR) column basis."""
    y, H = _check_inputs(y, H)
    N, P = H.shape
    if P > N:
        raise ValueError("more modes than samples: columns cannot be independent")
    Q, R = np.linalg.qr(H)
    diag = np.diag(R)
    col_norms = np.linalg.norm(H, axis=0)
    deficient = np.flatnonzero(np.abs(diag) < 1e-10 * col_norms)
    if deficient.size:
        raise ValueError(
            f"rank-deficient design: mode index {deficient[0]} is linearly "
            "dependent on earlier modes"
        )
    signs = np.sign(diag)
    v = signs * (Q.T @ y) / np.sqrt(N)
    noise = (float(y @ y) - float(np.sum((Q.T @ y) ** 2))) / N
    return TargetDecomposition(
        modes=list(modes) if modes is not None else list(range(P)),
        coefficients=v,
        noise_power=max(noise, 0.0),
        method="gram_schmidt",
        sample_count=N,
    )


def decompose_from_dataset(X, y, spectrum, P, L, method="gram_schmidt"):
    """Degree-major design matrix + chosen method, keyed by multi-index."""
    y = np.asarray(y, dtype=np.float64).ravel()
    X = np.asarray(X, dtype=np.float64)
    if y.shape[0] != X.shape[0]:
        raise ValueError("label count must match sample count")
    if P > X.shape[0]:
        raise ValueError("P must not exceed the sample count")
    modes = degree_major_ordering(spectrum, P, L)
    H = evaluate_modes(modes, spectrum, X)
    if method == "grf":
        return grf(y, H, modes=modes)
    if method == "gram_schmidt":
        return gram_schmidt_decompose(y, H, modes=modes)
    raise ValueError(f"unknown decomposition method {method!r}")
