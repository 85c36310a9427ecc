"""Exact Gaussian-kernel-on-Gaussian-measure eigensystem, plus a small-matrix
probe of the dot-product-kernel convergence rate.

For the Gaussian kernel exp(-||x-x'||^2 / (2 sigma^2)) on N(0, Gamma) the
eigensystem is known in closed form: per dimension

    t_i = 2 arsinh(sigma / (2 sqrt(gamma_i))),
    tau_i = (1/4) ln(1 + 4 gamma_i / sigma^2),

eigenvalues prod_i (1 - e^{-t_i}) e^{-alpha_i t_i}, and eigenfunctions given
by a squeeze of the Hermite functions,

    phi_alpha(x) = prod_i e^{tau_i/2} e^{-((e^{2 tau_i}-1)/4) z_i^2}
                   h_{alpha_i}(e^{tau_i} z_i),      z = Gamma^{-1/2} U^T x.

This is the ground truth the Hermite-eigensystem approximation is tested
against. dpk_convergence_probe measures the approximation's convergence rate
for abstract dot-product kernels by exact finite diagonalization in a
monomial basis (closed-form Gaussian moments, no sampling noise).
"""

import math
from dataclasses import dataclass

import numpy as np

from .hermite import MultiIndex, hermite_table, pca_coordinates


@dataclass
class MehlerParams:
    sigma: float
    gammas: np.ndarray  # positive eigenvalues only
    dims: np.ndarray  # original dimension index per entry
    t: np.ndarray
    tau: np.ndarray


def mehler_parameters(sigma, gammas):
    """Closed-form parameters (t_i, tau_i); zero-variance dims are excluded."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    gammas = np.asarray(gammas, dtype=np.float64)
    dims = np.flatnonzero(gammas > 0)
    g = gammas[dims]
    t = 2.0 * np.arcsinh(sigma / (2.0 * np.sqrt(g)))
    tau = 0.25 * np.log1p(4.0 * g / sigma**2)
    return MehlerParams(sigma=float(sigma), gammas=g, dims=dims, t=t, tau=tau)


def mehler_eigenvalue(params, alpha):
    """prod_i (1 - e^{-t_i}) e^{-alpha_i t_i}."""
    log_lam = float(np.sum(np.log1p(-np.exp(-params.t))))
    order_of = dict(alpha.entries)
    for pos, dim in enumerate(params.dims):
        k = order_of.get(int(dim), 0)
        if k:
            log_lam -= k * params.t[pos]
    return math.exp(log_lam)


def mehler_eigenfunction(params, alpha, X, spectrum):
    """Evaluate the exact eigenfunction phi_alpha at the samples."""
    Z = pca_coordinates(spectrum, X)
    order_of = dict(alpha.entries)
    out = np.ones(Z.shape[0])
    for pos, dim in enumerate(params.dims):
        tau = params.tau[pos]
        z = Z[:, dim]
        k = order_of.get(int(dim), 0)
        scaled = math.exp(tau) * z
        herm = hermite_table(scaled, k)[:, k]
        out *= math.exp(tau / 2.0) * np.exp(-(math.exp(2 * tau) - 1) / 4.0 * z**2) * herm
    return out


# ---------------------------------------------------------------------------
# exact dot-product-kernel probe


def _double_factorial(n):
    # (-1)!! = 1
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def _gram_1d(kmax):
    """Gram matrix of normalized monomials v_n = x^n / sqrt((2n-1)!!) under
    N(0,1): <v_n, v_m> = (n+m-1)!! / sqrt((2n-1)!!(2m-1)!!) for n+m even."""
    G = np.zeros((kmax + 1, kmax + 1))
    for n in range(kmax + 1):
        for m in range(n, kmax + 1):
            if (n + m) % 2 == 0:
                val = _double_factorial(n + m - 1) / math.sqrt(
                    _double_factorial(2 * n - 1) * _double_factorial(2 * m - 1)
                )
                G[n, m] = G[m, n] = val
    return G


def _hermite_in_monomials(kmax):
    """C[n, m] with h_n = sum_m C[n, m] v_m (normalized monomials, any gamma)."""
    C = np.zeros((kmax + 1, kmax + 1))
    for n in range(kmax + 1):
        for j in range(n // 2 + 1):
            m = n - 2 * j
            C[n, m] = (
                math.sqrt(math.factorial(n))
                * (-1) ** j
                * math.sqrt(_double_factorial(2 * m - 1))
                / (2**j * math.factorial(j) * math.factorial(m))
            )
    return C


def _all_modes(d, L):
    modes = [()]
    for _ in range(L):
        grown = set(modes)
        for t in modes:
            for dim in range(d):
                grown.add(tuple(sorted(t + (dim,))))
        modes = sorted(grown)
    return [tuple(sorted(t)) for t in sorted(set(modes), key=lambda t: (len(t), t))]


def _mode_dense(t, d):
    alpha = np.zeros(d, dtype=np.int64)
    for dim in t:
        alpha[dim] += 1
    return alpha


def dpk_probe_once(gammas, c_values, L_basis, measure_degree):
    """Exact eigensystem of K(x,y) = sum_l (c_l / l!) (x.y)^l on N(0, Gamma)
    restricted to the span of monomials of degree <= L_basis, compared
    against the Hermite-eigensystem prediction.

    Returns (max relative eigenvalue error, max principal angle) over modes
    of degree <= measure_degree.
    """
    gammas = np.asarray(gammas, dtype=np.float64)
    d = gammas.size
    c_values = np.asarray(c_values, dtype=np.float64)
    modes = _all_modes(d, L_basis)
    P = len(modes)
    dense = [_mode_dense(t, d) for t in modes]

    # operator coefficients: K = sum_alpha a_alpha v_alpha(x) v_alpha(y)
    a = np.empty(P)
    for p, alpha in enumerate(dense):
        ell = int(alpha.sum())
        coef = c_values[ell] if ell < c_values.size else 0.0
        for dim in range(d):
            k = int(alpha[dim])
            if k:
                coef *= gammas[dim] ** k * _double_factorial(2 * k - 1) / math.factorial(k)
        a[p] = coef

    kmax = L_basis
    G1 = _gram_1d(kmax)
    G = np.empty((P, P))
    for p in range(P):
        for q in range(p, P):
            val = 1.0
            for dim in range(d):
                val *= G1[dense[p][dim], dense[q][dim]]
            G[p, q] = G[q, p] = val

    # nonzero spectrum of the kernel operator = spectrum of sqrt(D_a) G sqrt(D_a)
    sqrt_a = np.sqrt(a)
    M = (sqrt_a[:, None] * G) * sqrt_a[None, :]
    evals, evecs = np.linalg.eigh(M)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]

    # predicted eigenvalues, sorted the same way
    C1 = _hermite_in_monomials(kmax)
    lam_pred = np.array(
        [
            (c_values[int(al.sum())] if al.sum() < c_values.size else 0.0)
            * np.prod(gammas**al)
            for al in dense
        ]
    )
    pred_order = np.argsort(lam_pred)[::-1]

    # orthonormal coordinates: y = G^{1/2} x turns L2 inner products Euclidean
    gw, gv = np.linalg.eigh(G)
    gw = np.clip(gw, 0.0, None)
    G_half = (gv * np.sqrt(gw)) @ gv.T

    max_err = 0.0
    max_angle = 0.0
    for rank, pidx in enumerate(pred_order):
        alpha = dense[pidx]
        if alpha.sum() > measure_degree:
            continue
        lam_h = lam_pred[pidx]
        lam_true = evals[rank]
        max_err = max(max_err, abs(lam_true - lam_h) / lam_h)
        # true eigenfunction in monomial coordinates: x = sqrt(a) w / sqrt(lam)
        w = evecs[:, rank]
        x_true = sqrt_a * w / math.sqrt(max(lam_true, 1e-300))
        y_true = G_half @ x_true
        # Hermite mode in monomial coordinates: product of 1D expansions
        x_h = np.zeros(P)
        for q, beta in enumerate(dense):
            val = 1.0
            for dim in range(d):
                val *= C1[alpha[dim], beta[dim]]
            x_h[q] = val
        y_h = G_half @ x_h
        cosine = abs(float(y_true @ y_h))
        cosine /= max(np.linalg.norm(y_true) * np.linalg.norm(y_h), 1e-300)
        max_angle = max(max_angle, math.acos(min(cosine, 1.0)))
    return max_err, max_angle


def dpk_convergence_probe(gammas, eps_values, degree=2, variant="generic"):
    """Convergence-rate measurement for dot-product kernels with c_l = eps^l.

    variant "generic" truncates the coefficient series at `degree` (the
    generic situation covered by the linear convergence rate); variant
    "exponential" keeps the full geometric series, whose special structure
    converges at the squared rate.

    Returns (rows, slope): rows of (eps, max_eigval_rel_err,
    max_principal_angle) and the fitted log-log slope of the eigenvalue
    error.
    """
    gammas = np.asarray(gammas, dtype=np.float64)
    if gammas.size > 6 or degree > 5:
        raise ValueError("probe restricted to d <= 6, degree <= 5")
    rows = []
    for eps in eps_values:
        if variant == "generic":
            c = eps ** np.arange(degree + 1, dtype=np.float64)
            L_basis = degree
        elif variant == "exponential":
            c = eps ** np.arange(17, dtype=np.float64)
            L_basis = 16 if gammas.size == 1 else 8
        else:
            raise ValueError(f"unknown probe variant {variant!r}")
        err, angle = dpk_probe_once(gammas, c, L_basis, degree)
        rows.append((float(eps), err, angle))
    errs = np.array([r[1] for r in rows])
    epss = np.array([r[0] for r in rows])
    slope = float(np.polyfit(np.log(epss), np.log(errs), 1)[0])
    return rows, slope
