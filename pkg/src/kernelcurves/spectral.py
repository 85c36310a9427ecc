"""Empirical kernel diagonalization and eigensystem comparison.

The empirical eigensystem comes from diagonalizing K_XX / N; eigenfunction
samples are sqrt(N) u_i so that (1/N) <phi, phi> = 1. Predicted and empirical
eigensystems are compared degeneracy-aware: eigenvalues are assigned to
log-spaced bins, and per-bin subspace overlaps

    Overlap(i, j) = ||Phi_i(th)^T Phi_j(emp)||_F^2 / d_j(emp)

are computed on orthonormalized bases.
"""

import json
from dataclasses import dataclass

import numpy as np

from .eigensystem import evaluate_eigensystem
from .kernels import kernel_matrix


@dataclass
class EmpiricalEigensystem:
    eigenvalues: np.ndarray  # descending
    functions: np.ndarray  # N x k, column i = sqrt(N) u_i
    n_samples: int
    kernel: object


@dataclass
class OverlapReport:
    bin_edges: np.ndarray  # descending edges, len nbins + 1
    dims_th: np.ndarray  # modes per bin, theoretical
    dims_emp: np.ndarray
    overlap: np.ndarray  # nbins x nbins, nan where undefined
    dropped_th: int  # nonpositive eigenvalues excluded
    dropped_emp: int

    def to_dict(self):
        matrix = [
            [None if np.isnan(v) else float(v) for v in row] for row in self.overlap
        ]
        return {
            "bin_edges": [float(e) for e in self.bin_edges],
            "dims_th": [int(v) for v in self.dims_th],
            "dims_emp": [int(v) for v in self.dims_emp],
            "overlap": matrix,
            "dropped_th": self.dropped_th,
            "dropped_emp": self.dropped_emp,
        }

    def dump_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)


def empirical_eigensystem(spec, X, k):
    """Top-k eigenpairs of K_XX / N."""
    X = np.asarray(X, dtype=np.float64)
    N = X.shape[0]
    if k > N:
        raise ValueError("cannot ask for more modes than samples")
    K = kernel_matrix(spec, X)
    asym = np.max(np.abs(K - K.T))
    if asym > 1e-10:
        raise RuntimeError(f"kernel matrix asymmetry {asym:.3e}")
    evals, evecs = np.linalg.eigh(K / N)
    order = np.argsort(evals)[::-1][:k]
    evals = evals[order]
    if np.any(evals < -1e-10):
        raise RuntimeError("kernel matrix has a significantly negative eigenvalue")
    return EmpiricalEigensystem(
        eigenvalues=np.clip(evals, 0.0, None),
        functions=np.sqrt(N) * evecs[:, order],
        n_samples=N,
        kernel=spec,
    )


def spectral_bins(lam_th, lam_emp, bins_per_decade=2):
    """Shared log-spaced bins over both spectra.

    Bin b covers [10^(b/bpd), 10^((b+1)/bpd)); assignments index into the
    descending list of bins spanning all positive values. Returns
    (edges descending, assign_th, assign_emp, dropped_th, dropped_emp) where
    assignments are -1 for dropped (nonpositive) values.
    """
    lam_th = np.asarray(lam_th, dtype=np.float64)
    lam_emp = np.asarray(lam_emp, dtype=np.float64)
    pos_th = lam_th > 0
    pos_emp = lam_emp > 0
    if not np.any(pos_th) or not np.any(pos_emp):
        raise ValueError("a spectrum has no positive eigenvalues")

    def raw_bins(lam, pos):
        out = np.full(lam.shape, np.iinfo(np.int64).min, dtype=np.int64)
        out[pos] = np.floor(np.log10(lam[pos]) * bins_per_decade).astype(np.int64)
        return out

    b_th = raw_bins(lam_th, pos_th)
    b_emp = raw_bins(lam_emp, pos_emp)
    top = max(b_th[pos_th].max(), b_emp[pos_emp].max())
    bottom = min(b_th[pos_th].min(), b_emp[pos_emp].min())
    nbins = top - bottom + 1
    # descending order: bin 0 holds the largest eigenvalues
    edges = 10.0 ** (np.arange(top + 1, bottom - 1, -1) / bins_per_decade)

    def assign(raw, pos):
        out = np.full(raw.shape, -1, dtype=np.int64)
        out[pos] = top - raw[pos]
        return out

    return edges, assign(b_th, pos_th), assign(b_emp, pos_emp), int(nbins)


def _orthonormalize(columns):
    Q, _ = np.linalg.qr(columns)
    return Q


def subspace_overlap(phi_th_bins, phi_emp_bins):
    """Overlap matrix over aligned bin lists.

    phi_*_bins: list (len nbins) of matrices with orthonormal columns, or
    None for empty bins. Cells touching an empty bin are nan.
    """
    if len(phi_th_bins) != len(phi_emp_bins):
        raise ValueError("bin lists must align")
    nbins = len(phi_th_bins)
    overlap = np.full((nbins, nbins), np.nan)
    for i, phi_th in enumerate(phi_th_bins):
        if phi_th is None:
            continue
        for j, phi_emp in enumerate(phi_emp_bins):
            if phi_emp is None:
                continue
            cross = phi_th.T @ phi_emp
            overlap[i, j] = float(np.sum(cross**2)) / phi_emp.shape[1]
    return overlap


def compare_eigensystems(hea, emp, X, bins_per_decade=2):
    """Full comparison of a predicted eigensystem against an empirical one.

    The predicted eigenfunction samples (Hermite evaluations at X, scaled to
    unit per-sample power) are re-orthonormalized within each bin before the
    overlap, since they are only approximately orthonormal on finite samples.
    """
    X = np.asarray(X, dtype=np.float64)
    N = X.shape[0]
    lam_th = hea.eigenvalues()
    lam_emp = emp.eigenvalues
    edges, assign_th, assign_emp, nbins = spectral_bins(
        lam_th, lam_emp, bins_per_decade
    )
    H = evaluate_eigensystem(hea, X) / np.sqrt(N)
    phi_emp_unit = emp.functions / np.sqrt(N)  # orthonormal columns

    phi_th_bins, phi_emp_bins = [], []
    dims_th = np.zeros(nbins, dtype=np.int64)
    dims_emp = np.zeros(nbins, dtype=np.int64)
    for b in range(nbins):
        th_cols = np.flatnonzero(assign_th == b)
        emp_cols = np.flatnonzero(assign_emp == b)
        dims_th[b] = th_cols.size
        dims_emp[b] = emp_cols.size
        phi_th_bins.append(_orthonormalize(H[:, th_cols]) if th_cols.size else None)
        phi_emp_bins.append(phi_emp_unit[:, emp_cols] if emp_cols.size else None)
    overlap = subspace_overlap(phi_th_bins, phi_emp_bins)
    return OverlapReport(
        bin_edges=edges,
        dims_th=dims_th,
        dims_emp=dims_emp,
        overlap=overlap,
        dropped_th=int(np.sum(assign_th == -1)),
        dropped_emp=int(np.sum(assign_emp == -1)),
    )


def top_bin_overlaps(report, count):
    """Diagonal overlaps of the top `count` bins populated on both sides."""
    populated = np.flatnonzero((report.dims_th > 0) & (report.dims_emp > 0))
    chosen = populated[:count]
    return report.overlap[chosen, chosen]


def eigenvalue_scatter(hea, emp):
    """Rank-paired (rank, lambda_emp, lambda_th, degree) rows, zero modes
    dropped before ranking."""
    lam_th = hea.eigenvalues()
    degrees = np.array([alpha.degree for alpha in hea.multi_indices()])
    keep_th = lam_th > 0
    lam_th, degrees = lam_th[keep_th], degrees[keep_th]
    lam_emp = emp.eigenvalues[emp.eigenvalues > 0]
    k = min(lam_th.size, lam_emp.size)
    return [
        (rank, float(lam_emp[rank]), float(lam_th[rank]), int(degrees[rank]))
        for rank in range(k)
    ]
