"""Rotation-invariant kernel families and their on-sphere level coefficients.

Families:
  gaussian(sigma)      K = exp(-||x - x'||^2 / (2 sigma^2))
  exponential(sigma)   K = exp(x.x' / sigma^2)
  laplace(sigma)       K = exp(-||x - x'|| / sigma)
  relu_nngp(sw2, sb2)  one-hidden-layer ReLU NNGP (arccosine) kernel
  relu_ntk(sw2, sb2)   one-hidden-layer ReLU NTK

On the sphere ||x|| = ||x'|| = r each kernel has an expansion
K(x, x') = sum_l (c_l / l!) (x.x')^l with nonnegative level coefficients c_l;
level_coefficients returns them in closed form.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class KernelSpec:
    family: str
    sigma: float | None = None
    sigma_w2: float | None = None
    sigma_b2: float | None = None

    _FAMILIES = ("gaussian", "exponential", "laplace", "relu_nngp", "relu_ntk")

    def __post_init__(self):
        if self.family not in self._FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family in ("gaussian", "exponential", "laplace"):
            if self.sigma is None or self.sigma <= 0:
                raise ValueError(f"{self.family} kernel needs sigma > 0")
        else:
            if self.sigma_w2 is None or self.sigma_w2 <= 0:
                raise ValueError(f"{self.family} kernel needs sigma_w2 > 0")
            if self.sigma_b2 is None or self.sigma_b2 < 0:
                raise ValueError(f"{self.family} kernel needs sigma_b2 >= 0")

    def to_dict(self):
        params = {}
        if self.sigma is not None:
            params["sigma"] = self.sigma
        if self.sigma_w2 is not None:
            params["sigma_w2"] = self.sigma_w2
        if self.sigma_b2 is not None:
            params["sigma_b2"] = self.sigma_b2
        return {"family": self.family, "parameters": params}

    @classmethod
    def from_dict(cls, cfg):
        return cls(family=cfg["family"], **cfg.get("parameters", {}))


def gaussian(sigma):
    return KernelSpec("gaussian", sigma=float(sigma))


def exponential(sigma):
    return KernelSpec("exponential", sigma=float(sigma))


def laplace(sigma):
    return KernelSpec("laplace", sigma=float(sigma))


def relu_nngp(sigma_w2, sigma_b2=0.0):
    return KernelSpec("relu_nngp", sigma_w2=float(sigma_w2), sigma_b2=float(sigma_b2))


def relu_ntk(sigma_w2, sigma_b2=0.0):
    return KernelSpec("relu_ntk", sigma_w2=float(sigma_w2), sigma_b2=float(sigma_b2))


def _arc_H(rho):
    # angular part of the arccosine/NNGP kernel
    return np.sqrt(1.0 - rho**2) + (np.pi - np.arccos(rho)) * rho


def _arc_J(rho):
    # angular part of the NTK
    return np.sqrt(1.0 - rho**2) + 2.0 * rho * (np.pi - np.arccos(rho))


def kernel_matrix(spec, A, B=None):
    """Pairwise kernel matrix K[i, j] = K(A[i], B[j]); B defaults to A."""
    A = np.asarray(A, dtype=np.float64)
    B = A if B is None else np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[1]:
        raise ValueError("dimension mismatch between A and B")
    if spec.family == "gaussian":
        sq = cdist(A, B, "sqeuclidean")
        return np.exp(-sq / (2.0 * spec.sigma**2))
    if spec.family == "exponential":
        return np.exp((A @ B.T) / spec.sigma**2)
    if spec.family == "laplace":
        return np.exp(-cdist(A, B, "euclidean") / spec.sigma)
    # arccosine family
    qa = spec.sigma_w2 * np.sum(A**2, axis=1) + spec.sigma_b2
    qb = spec.sigma_w2 * np.sum(B**2, axis=1) + spec.sigma_b2
    scale = np.sqrt(np.outer(qa, qb))
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = (spec.sigma_w2 * (A @ B.T) + spec.sigma_b2) / scale
    rho = np.clip(np.nan_to_num(rho), -1.0, 1.0)
    angular = _arc_H(rho) if spec.family == "relu_nngp" else _arc_J(rho)
    return (spec.sigma_w2 / (2.0 * np.pi)) * scale * angular


@dataclass(frozen=True)
class LevelCoefficients:
    radius: float
    values: np.ndarray
    truncation: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if values.shape != (self.truncation + 1,):
            raise ValueError("need truncation + 1 coefficient values")
        if not np.all(np.isfinite(values)):
            raise ValueError("non-finite level coefficient")
        if np.any(values < -1e-15 * np.max(np.abs(values))):
            raise ValueError("negative level coefficient")


def _bessel_poly(n, x):
    """Ordinary Bessel polynomial y_n(x), y_{-1} = y_0 = 1."""
    prev, cur = 1.0, 1.0
    for k in range(1, n + 1):
        prev, cur = cur, (2 * k - 1) * x * cur + prev
    return cur


def _derivative_arc(kind, a, ell):
    """ell-th derivative of the angular function H (nngp) or J (ntk) at a.

    Orders 0 and 1 use the arccos closed forms. From order 2 on the
    derivative has the algebraic form p(a) / (1 - a^2)^(m/2) with odd m and
    integer polynomial p, which is propagated exactly:
    differentiating gives p_next = p' (1 - a^2) + m a p and m_next = m + 2.
    """
    if abs(a) >= 1:
        raise ValueError("|a| must be < 1")
    if kind == "H":
        if ell == 0:
            return math.sqrt(1 - a * a) + (math.pi - math.acos(a)) * a
        if ell == 1:
            return math.pi - math.acos(a)
        p, m = [1], 1  # H'' = 1 / (1 - a^2)^(1/2)
        start = 2
    else:
        if ell == 0:
            return math.sqrt(1 - a * a) + 2 * a * (math.pi - math.acos(a))
        if ell == 1:
            return 2 * (math.pi - math.acos(a)) + a / math.sqrt(1 - a * a)
        p, m = [3, 0, -2], 3  # J'' = (3 - 2 a^2) / (1 - a^2)^(3/2)
        start = 2
    for _ in range(start, ell):
        dp = [k * c for k, c in enumerate(p)][1:] or [0]
        # p' (1 - a^2)
        term1 = dp + [0, 0]
        for k, c in enumerate(dp):
            term1[k + 2] -= c
        # m a p
        term2 = [0] + [m * c for c in p]
        p = [t1 + t2 for t1, t2 in zip(term1, term2 + [0] * (len(term1) - len(term2)))]
        m += 2
    value = sum(c * a**k for k, c in enumerate(p))
    return value / (1 - a * a) ** (m / 2.0)


def level_coefficients(spec, r, L):
    """On-sphere level coefficients c_0..c_L of the kernel at radius r."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if L < 0:
        raise ValueError("truncation must be nonnegative")
    ell = np.arange(L + 1)
    if spec.family == "gaussian":
        values = math.exp(-(r**2) / spec.sigma**2) * spec.sigma ** (-2.0 * ell)
    elif spec.family == "exponential":
        values = spec.sigma ** (-2.0 * ell)
    elif spec.family == "laplace":
        beta = math.sqrt(2.0) * r / spec.sigma
        values = np.array(
            [
                math.exp(-beta)
                * r ** (-2.0 * n)
                * (beta / 2.0) ** n
                * _bessel_poly(n - 1, 1.0 / beta)
                for n in range(L + 1)
            ]
        )
    else:
        q = spec.sigma_w2 * r**2 + spec.sigma_b2
        a = spec.sigma_b2 / q
        if a >= 1:
            raise ValueError("degenerate arccosine kernel: sigma_b2/q >= 1")
        kind = "H" if spec.family == "relu_nngp" else "J"
        values = np.array(
            [
                spec.sigma_w2
                / (2.0 * np.pi)
                * q
                * (spec.sigma_w2 / q) ** n
                * _derivative_arc(kind, a, n)
                for n in range(L + 1)
            ]
        )
    return LevelCoefficients(radius=float(r), values=values, truncation=int(L))


def trace_estimate(spec, X):
    """Average diagonal kernel value (1/N) sum_i K(x_i, x_i)."""
    X = np.asarray(X, dtype=np.float64)
    if spec.family in ("gaussian", "laplace"):
        return 1.0
    sq = np.sum(X**2, axis=1)
    if spec.family == "exponential":
        return float(np.mean(np.exp(sq / spec.sigma**2)))
    q = spec.sigma_w2 * sq + spec.sigma_b2
    if spec.family == "relu_nngp":
        # H(1) = pi
        return float(np.mean(spec.sigma_w2 * q / 2.0))
    # J(1) = 2 pi
    return float(np.mean(spec.sigma_w2 * q))
