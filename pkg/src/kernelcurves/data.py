"""Data handling: covariance estimation, preprocessing, synthetic generators.

Samples are stored as rows of an N x d float64 matrix. The covariance here is
the uncentered second moment E[x x^T] unless centering is requested, since the
whole eigenstructure machinery assumes a mean-zero measure.
"""

from dataclasses import dataclass

import numpy as np

# eigenvalues below this fraction of the largest one are clamped to zero so
# that dividing by sqrt(gamma) in PCA coordinates stays stable
EIG_CLAMP_REL = 1e-14


@dataclass
class CovarianceSpectrum:
    """Eigendecomposition of a d x d second-moment matrix.

    directions: orthonormal d x d matrix, column i = i-th eigenvector
    eigenvalues: descending, nonnegative
    """

    directions: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        self.directions = np.asarray(self.directions, dtype=np.float64)
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)
        d = self.directions.shape[0]
        if self.directions.shape != (d, d):
            raise ValueError("directions must be square")
        if self.eigenvalues.shape != (d,):
            raise ValueError("eigenvalue count must match dimension")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("eigenvalues must be sorted descending")
        if np.any(self.eigenvalues < 0):
            raise ValueError("eigenvalues must be nonnegative")
        gram = self.directions.T @ self.directions
        if np.max(np.abs(gram - np.eye(d))) > 1e-10:
            raise ValueError("directions not orthonormal")

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    @property
    def radius(self):
        return float(np.sqrt(np.sum(self.eigenvalues)))

    @property
    def effective_dimension(self):
        total = np.sum(self.eigenvalues)
        sq = np.sum(self.eigenvalues**2)
        if sq == 0.0:
            raise ValueError("zero covariance has no effective dimension")
        return float(total**2 / sq)

    @classmethod
    def from_eigenvalues(cls, eigenvalues, directions=None):
        eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
        if directions is None:
            directions = np.eye(eigenvalues.shape[0])
        return cls(directions, eigenvalues)


@dataclass
class PreprocessConfig:
    zca_strength: float | None = None  # omega^2; None disables ZCA
    normalize_samples: bool = False
    center: bool = False

    def __post_init__(self):
        if self.zca_strength is not None:
            w2 = float(self.zca_strength)
            if not np.isfinite(w2) or w2 < 0:
                raise ValueError("zca_strength must be finite and nonnegative")
            self.zca_strength = w2


def check_data_matrix(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("data must be a nonempty 2D matrix")
    if not np.all(np.isfinite(X)):
        raise ValueError("data matrix has non-finite entries")
    return X


def estimate_covariance(X, center=False):
    """Eigendecomposition of the (optionally centered) second moment X^T X / N."""
    X = check_data_matrix(X)
    N = X.shape[0]
    if center:
        if N < 2:
            raise ValueError("centering needs at least 2 samples")
        X = X - X.mean(axis=0)
    second_moment = (X.T @ X) / N
    evals, evecs = np.linalg.eigh(second_moment)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    if evals[0] > 0:
        evals[evals < EIG_CLAMP_REL * evals[0]] = 0.0
    return CovarianceSpectrum(evecs, evals)


def zca_whiten(X, omega2, norm_dim=None):
    """Regularized ZCA whitening with strength omega^2.

    Interpolates between a pure global rescale (omega2 = 0) and full
    whitening (omega2 -> inf). Singular values s are mapped to
    rms1(s / sqrt(omega2 * rms1(s^2)^2 + 1)) where rms1(a) = a / rms(a)
    normalizes to unit root mean square over norm_dim entries (default: the
    data dimension d).
    """
    X = check_data_matrix(X)
    N, d = X.shape
    if omega2 < 0:
        raise ValueError("omega2 must be nonnegative")
    if norm_dim is None:
        norm_dim = d
    # feature-space SVD: columns of U live in R^d
    U, s, Vt = np.linalg.svd(X.T, full_matrices=False)
    if not np.any(s > 0):
        raise ValueError("cannot whiten a zero matrix")

    def unit_rms(a):
        return a / np.sqrt(np.sum(a**2) / norm_dim)

    s2 = unit_rms(s**2)
    s_new = unit_rms(s / np.sqrt(omega2 * s2 + 1.0))
    return ((U * s_new) @ Vt).T


def normalize_samples(X):
    """Project every sample onto the unit sphere, x -> x / ||x||."""
    X = check_data_matrix(X)
    norms = np.linalg.norm(X, axis=1)
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        raise ValueError(f"cannot normalize zero sample at row {bad[0]}")
    return X / norms[:, None]


def sample_gaussian(spectrum, N, seed):
    """Draw N samples of a mean-zero Gaussian with the given covariance."""
    if N < 1:
        raise ValueError("N must be >= 1")
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((N, spectrum.dim))
    return (Z * np.sqrt(spectrum.eigenvalues)) @ spectrum.directions.T


def preprocess(X, config):
    X = check_data_matrix(X)
    if config.center:
        X = X - X.mean(axis=0)
    if config.zca_strength is not None:
        X = zca_whiten(X, config.zca_strength)
    if config.normalize_samples:
        X = normalize_samples(X)
    return X


def powerlaw_target(hea, X, beta, seed):
    """Random target with powerlaw mode powers plus calibrated white noise.

    Coefficient i (1-based, over the eigensystem's mode order) is drawn from
    N(0, (i+6)^-beta); the noise level is set so E[y^2] = 1.

    Returns (y, coefficients, noise_level).
    """
    from .eigensystem import evaluate_eigensystem

    if beta <= 1:
        raise ValueError("beta must exceed 1 (target power diverges)")
    X = check_data_matrix(X)
    rng = np.random.default_rng(seed)
    P = len(hea.modes)
    idx = np.arange(1, P + 1, dtype=np.float64)
    coeffs = rng.standard_normal(P) * np.sqrt((idx + 6.0) ** (-beta))
    power = float(np.sum(coeffs**2))
    if power > 1.0:
        coeffs = coeffs / np.sqrt(power)
        noise = 0.0
    else:
        noise = float(np.sqrt(1.0 - power))
    H = evaluate_eigensystem(hea, X)
    y = H @ coeffs + noise * rng.standard_normal(X.shape[0])
    return y, coeffs, noise
