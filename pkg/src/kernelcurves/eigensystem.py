"""Hermite eigensystem construction.

For a covariance spectrum (gamma_i) and level coefficients (c_l), mode alpha
has eigenvalue lambda_alpha = c_|alpha| * prod_i gamma_i^alpha_i and
eigenfunction h_alpha in PCA coordinates. build_eigensystem returns the top-P
modes by eigenvalue without materializing the full multi-index lattice;
degree_major_ordering returns a kernel-independent ordering used for target
decomposition.
"""

import heapq
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .hermite import MultiIndex, design_matrix, pca_coordinates


@dataclass
class HermiteEigensystem:
    modes: list  # list of (MultiIndex, lambda) in the stated ordering
    spectrum: object
    coefficients: object
    ordering: str  # "eigenvalue-descending" or "degree-major"
    truncated: bool = False  # True when fewer than the requested P modes exist

    def eigenvalues(self):
        return np.array([lam for _, lam in self.modes])

    def multi_indices(self):
        return [alpha for alpha, _ in self.modes]


def _tuple_to_multiindex(dims, t):
    # t: non-decreasing tuple of positions into the positive-gamma list
    entries = {}
    for pos in t:
        dim = dims[pos]
        entries[dim] = entries.get(dim, 0) + 1
    return MultiIndex(tuple(entries.items()))


def _level_products(gammas, level):
    """Yield (product, position-tuple) for |alpha| = level, product descending.

    gammas must be sorted descending and positive. Tuples are non-decreasing
    position sequences of length `level` (a multiset of dimension choices);
    best-first search over the lattice with successors that increment one
    position while keeping the sequence sorted.
    """
    if level == 0:
        yield 1.0, ()
        return
    m = len(gammas)
    start = (0,) * level
    heap = [(-float(np.prod(gammas[list(start)])), start)]
    seen = {start}
    while heap:
        negp, t = heapq.heappop(heap)
        yield -negp, t
        for j in range(level):
            nxt = t[j] + 1
            if nxt >= m:
                continue
            if j < level - 1 and nxt > t[j + 1]:
                continue
            nt = t[:j] + (nxt,) + t[j + 1 :]
            if nt not in seen:
                seen.add(nt)
                ratio = gammas[nxt] / gammas[t[j]]
                heapq.heappush(heap, ((negp) * ratio, nt))
    return


def _positive_part(spectrum):
    gammas = spectrum.eigenvalues
    dims = np.flatnonzero(gammas > 0)
    return gammas[dims], dims


def build_eigensystem(spectrum, coeffs, P, L):
    """Top-P modes over all |alpha| <= L, eigenvalue descending.

    Ties are broken by degree ascending, then by the sparse entry tuple.
    If fewer than P modes have positive eigenvalue, all of them are returned
    and the eigensystem is flagged truncated (with a warning).
    """
    if P < 1:
        raise ValueError("P must be >= 1")
    if L > coeffs.truncation:
        raise ValueError("L exceeds the coefficient truncation")
    gammas, dims = _positive_part(spectrum)
    if gammas.size == 0:
        raise ValueError("spectrum has no positive eigenvalues")
    c = coeffs.values

    # one lazily-advanced product stream per degree, merged on a heap
    streams = []
    for ell in range(L + 1):
        if c[ell] <= 0:
            continue
        gen = _level_products(gammas, ell)
        streams.append((ell, gen))
    heap = []
    for ell, gen in streams:
        prod, t = next(gen)
        heap.append((-c[ell] * prod, ell, t, gen))
    heapq.heapify(heap)

    modes = []
    while heap and len(modes) < P:
        neglam, ell, t, gen = heapq.heappop(heap)
        modes.append((_tuple_to_multiindex(dims, t), -neglam))
        nxt = next(gen, None)
        if nxt is not None:
            prod, t2 = nxt
            heapq.heappush(heap, (-c[ell] * prod, ell, t2, gen))

    truncated = len(modes) < P
    if truncated:
        warnings.warn(
            f"only {len(modes)} modes with positive eigenvalue at degree <= {L}; "
            f"requested {P}",
            stacklevel=2,
        )
    # deterministic tie-breaks: eigenvalue desc, degree asc, entry tuple
    modes.sort(key=lambda m: (-m[1], m[0].degree, m[0].entries))
    return HermiteEigensystem(
        modes=modes,
        spectrum=spectrum,
        coefficients=coeffs,
        ordering="eigenvalue-descending",
        truncated=truncated,
    )


def degree_major_ordering(spectrum, P, L):
    """First P modes ordered by (degree asc, product desc, entry tuple).

    Kernel-independent: uses only the covariance spectrum. Within a degree
    the within-level product order fills the remaining quota.
    """
    if P < 1:
        raise ValueError("P must be >= 1")
    gammas, dims = _positive_part(spectrum)
    if gammas.size == 0:
        raise ValueError("spectrum has no positive eigenvalues")
    modes = []
    for ell in range(L + 1):
        if len(modes) >= P:
            break
        batch = []
        last_prod = None
        for prod, t in _level_products(gammas, ell):
            # finish the current tie group before honoring the quota so the
            # selection is deterministic under relabeling
            if len(modes) + len(batch) >= P and prod != last_prod:
                break
            batch.append((prod, _tuple_to_multiindex(dims, t)))
            last_prod = prod
        batch.sort(key=lambda m: (-m[0], m[1].entries))
        modes.extend(alpha for _, alpha in batch[: P - len(modes)])
    return modes


def mode_eigenvalue(alpha, spectrum, coeffs):
    """lambda_alpha = c_|alpha| * prod gamma_i^alpha_i (0 beyond truncation)."""
    if alpha.degree > coeffs.truncation:
        return 0.0
    lam = coeffs.values[alpha.degree]
    for dim, order in alpha.entries:
        lam *= spectrum.eigenvalues[dim] ** order
    return float(lam)


def evaluate_eigensystem(hea, X):
    """N x P design matrix: column p = h_{alpha_p} at the samples."""
    return evaluate_modes(hea.multi_indices(), hea.spectrum, X)


def evaluate_modes(modes, spectrum, X):
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("empty data matrix")
    Z = pca_coordinates(spectrum, X)
    return design_matrix(modes, Z)


def dump_json(hea, path):
    payload = [
        {"alpha": alpha.to_dict(), "degree": alpha.degree, "lambda": lam}
        for alpha, lam in hea.modes
    ]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
