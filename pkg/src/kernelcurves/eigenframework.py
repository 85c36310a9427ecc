"""Spectral learning-curve predictions for kernel ridge regression.

Given a task spectrum (kernel eigenvalues, target eigencoefficients, noise,
ridge) the framework predicts test and train risk at sample size n through a
self-consistent regularization scale kappa solving

    sum_i lambda_i / (lambda_i + kappa) + delta / kappa = n.

The ridge is tail-corrected: modes beyond the truncation contribute their
total eigenvalue mass to an effective ridge delta_eff = delta + tail_mass.
"""

import warnings
from dataclasses import dataclass

import numpy as np

KAPPA_REL_TOL = 1e-10


class RidgelessError(RuntimeError):
    """No positive kappa exists (ridgeless interpolation regime)."""


@dataclass
class TaskSpectrum:
    eigenvalues: np.ndarray  # lambda_1 >= ... >= lambda_P >= 0
    coefficients: np.ndarray  # signed v_i, same length
    noise: float = 0.0  # epsilon^2
    ridge: float = 0.0  # delta
    tail_mass: float = 0.0  # sum of eigenvalues beyond the truncation

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        if self.eigenvalues.shape != self.coefficients.shape:
            raise ValueError("eigenvalues and coefficients must align")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("eigenvalues must be sorted descending")
        if np.any(self.eigenvalues < 0):
            raise ValueError("eigenvalues must be nonnegative")
        if not np.all(np.isfinite(self.eigenvalues)):
            raise ValueError("non-finite eigenvalue")
        if self.noise < 0 or self.ridge < 0 or self.tail_mass < 0:
            raise ValueError("noise, ridge and tail_mass must be nonnegative")

    @property
    def effective_ridge(self):
        return self.ridge + self.tail_mass


@dataclass
class RiskPrediction:
    n: float
    kappa: float
    e0: float
    bias: float
    test_risk: float
    train_risk: float


def tail_corrected_ridge(delta, trace, eigenvalues):
    """delta_eff = delta + max(0, trace - sum(eigenvalues))."""
    gap = float(trace - np.sum(eigenvalues))
    if gap < -1e-9:
        warnings.warn(
            f"eigenvalue mass exceeds the kernel trace by {-gap:.3e}; clamping",
            stacklevel=2,
        )
    return float(delta) + max(0.0, gap)


def _kappa_objective(kappa, lambdas, delta_eff, n):
    return float(np.sum(lambdas / (lambdas + kappa)) + delta_eff / kappa - n)


def solve_kappa(spectrum, n):
    """Solve the kappa fixed point at sample size n.

    Log-space bisection over a wide bracket, then Newton refinement; the
    objective is strictly decreasing in kappa so the root is unique.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    lambdas = spectrum.eigenvalues[spectrum.eigenvalues > 0]
    delta_eff = spectrum.effective_ridge
    if delta_eff <= 0 and lambdas.size <= n:
        raise RidgelessError(
            "ridgeless interpolation regime: no positive ridge and at most n "
            "positive modes; no positive kappa solves the fixed point"
        )
    total = float(np.sum(lambdas) + delta_eff)
    lo = delta_eff / n * 1e-6 if delta_eff > 0 else float(lambdas[-1]) * 1e-9
    hi = total / n * 1e6
    # expand the bracket if needed (delta = 0 with barely more modes than n)
    for _ in range(200):
        if _kappa_objective(lo, lambdas, delta_eff, n) > 0:
            break
        lo *= 0.1
    for _ in range(200):
        if _kappa_objective(hi, lambdas, delta_eff, n) < 0:
            break
        hi *= 10.0
    log_lo, log_hi = np.log(lo), np.log(hi)
    for _ in range(60):
        mid = 0.5 * (log_lo + log_hi)
        if _kappa_objective(np.exp(mid), lambdas, delta_eff, n) > 0:
            log_lo = mid
        else:
            log_hi = mid
    kappa = float(np.exp(0.5 * (log_lo + log_hi)))
    for _ in range(5):
        f = _kappa_objective(kappa, lambdas, delta_eff, n)
        df = -float(np.sum(lambdas / (lambdas + kappa) ** 2)) - delta_eff / kappa**2
        step = kappa - f / df
        if np.exp(log_lo) <= step <= np.exp(log_hi):
            kappa = step
    residual = abs(_kappa_objective(kappa, lambdas, delta_eff, n))
    if residual > KAPPA_REL_TOL * n:
        raise RuntimeError(f"kappa solver residual {residual:.3e} exceeds tolerance")
    return kappa


def predict_risk(spectrum, n):
    """Predicted risks at sample size n.

    e0 = n / (n - sum (lambda_i/(lambda_i+kappa))^2)
    bias = sum (kappa/(lambda_i+kappa))^2 v_i^2 + noise
    test = e0 * bias,  train = (delta_eff^2 / (n^2 kappa^2)) * test
    """
    kappa = solve_kappa(spectrum, n)
    lam = spectrum.eigenvalues
    learn = lam / (lam + kappa)
    denom = n - float(np.sum(learn**2))
    if denom <= 0:
        raise RuntimeError("overfitting coefficient diverged (denominator <= 0)")
    e0 = n / denom
    bias = float(np.sum((1.0 - learn) ** 2 * spectrum.coefficients**2)) + spectrum.noise
    test = e0 * bias
    train = (spectrum.effective_ridge**2 / (n**2 * kappa**2)) * test
    return RiskPrediction(
        n=n, kappa=kappa, e0=e0, bias=bias, test_risk=test, train_risk=train
    )


def learning_curve_prediction(spectrum, n_grid):
    n_grid = list(n_grid)
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be strictly increasing")
    return [predict_risk(spectrum, n) for n in n_grid]


def task_spectrum_from_decomposition(hea, decomp, noise=None, ridge=0.0, trace=None):
    """Pair the eigensystem's eigenvalues with decomposed target coefficients.

    Modes present in the eigensystem but not in the decomposition get v = 0;
    decomposed coefficients without a matching mode contribute nothing (their
    power is already counted in the decomposition's residual split). The
    noise defaults to the decomposition's residual power, and trace (if
    given) feeds the tail-corrected ridge.
    """
    coeff_by_mode = dict(zip(decomp.modes, decomp.coefficients))
    lams = hea.eigenvalues()
    order = np.argsort(lams)[::-1]
    modes = hea.multi_indices()
    lam_sorted = lams[order]
    v = np.array([coeff_by_mode.get(modes[i], 0.0) for i in order])
    if noise is None:
        noise = decomp.noise_power
    tail = 0.0
    if trace is not None:
        tail = tail_corrected_ridge(0.0, trace, lam_sorted)
    return TaskSpectrum(
        eigenvalues=lam_sorted,
        coefficients=v,
        noise=float(noise),
        ridge=float(ridge),
        tail_mass=tail,
    )
