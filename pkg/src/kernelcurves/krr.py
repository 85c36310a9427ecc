"""Empirical kernel ridge regression and learning-curve measurement."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .kernels import kernel_matrix


@dataclass
class LearningCurveResult:
    n_grid: np.ndarray
    mse_mean: np.ndarray
    mse_stderr: np.ndarray
    trials: int
    kernel: object
    ridge: float
    seed: int


def krr_fit_predict(spec, train_X, train_y, test_X, delta):
    """f_hat(test) = K_test,train (K_train,train + delta I)^{-1} y."""
    if delta < 0:
        raise ValueError("ridge must be nonnegative")
    train_y = np.asarray(train_y, dtype=np.float64).ravel()
    K = kernel_matrix(spec, train_X)
    K[np.diag_indices_from(K)] += delta
    try:
        factor = cho_factor(K, lower=True)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"kernel system not positive definite ({exc}); "
            "try a positive ridge delta"
        ) from exc
    weights = cho_solve(factor, train_y)
    return kernel_matrix(spec, test_X, train_X) @ weights


def empirical_learning_curve(spec, X, y, n_grid, delta, trials, test_size, seed):
    """Mean and standard error of test MSE over seeded trials per grid point.

    Each (grid point, trial) pair draws a fresh disjoint train/test split
    from the pool with its own RNG stream, so results are reproducible and
    independent of execution order.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n_grid = np.asarray(list(n_grid), dtype=np.int64)
    if trials < 1:
        raise ValueError("need at least one trial")
    pool = X.shape[0]
    if pool < int(n_grid.max()) + test_size:
        raise ValueError(
            f"pool of {pool} samples cannot supply {int(n_grid.max())} train "
            f"+ {test_size} test points"
        )
    mse = np.empty((len(n_grid), trials))
    for i, n in enumerate(n_grid):
        for t in range(trials):
            rng = np.random.default_rng([seed, i, t])
            perm = rng.permutation(pool)
            train = perm[:n]
            test = perm[n : n + test_size]
            pred = krr_fit_predict(spec, X[train], y[train], X[test], delta)
            mse[i, t] = float(np.mean((pred - y[test]) ** 2))
    stderr = (
        mse.std(axis=1, ddof=1) / np.sqrt(trials) if trials > 1 else np.zeros(len(n_grid))
    )
    return LearningCurveResult(
        n_grid=n_grid,
        mse_mean=mse.mean(axis=1),
        mse_stderr=stderr,
        trials=trials,
        kernel=spec,
        ridge=delta,
        seed=seed,
    )


def sample_complexity(n_grid, mse, threshold):
    """Smallest n where the curve falls to the threshold, by log-log
    interpolation between bracketing grid points.

    Returns n_grid[0] if the curve starts at or below the threshold, and
    inf if it never crosses.
    """
    n_grid = np.asarray(n_grid, dtype=np.float64)
    mse = np.asarray(mse, dtype=np.float64)
    below = np.flatnonzero(mse <= threshold)
    if below.size == 0:
        return float("inf")
    j = below[0]
    if j == 0:
        return float(n_grid[0])
    n0, n1 = n_grid[j - 1], n_grid[j]
    m0, m1 = mse[j - 1], mse[j]
    frac = (np.log(m0) - np.log(threshold)) / (np.log(m0) - np.log(m1))
    return float(np.exp(np.log(n0) + frac * (np.log(n1) - np.log(n0))))
