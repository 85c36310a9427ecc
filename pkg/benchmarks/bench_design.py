"""Benchmark the Hermite design-matrix kernels: compiled extension vs the
pure-numpy fallback.

Usage: python benchmarks/bench_design.py [--samples N] [--modes P] [--dim D]
"""

import argparse
import time

import numpy as np

from kernelcurves import CovarianceSpectrum
from kernelcurves import _fastpoly_py
from kernelcurves.eigensystem import degree_major_ordering

try:
    from kernelcurves import _fastpoly
except ImportError:
    _fastpoly = None


def pack_modes(modes):
    dims, orders, ptr = [], [], [0]
    for m in modes:
        for d, k in m.entries:
            dims.append(d)
            orders.append(k)
        ptr.append(len(dims))
    return (
        np.asarray(dims, dtype=np.int64),
        np.asarray(orders, dtype=np.int64),
        np.asarray(ptr, dtype=np.int64),
    )


def bench(impl, Z, args_packed, repeats=5):
    impl.design_matrix(Z, *args_packed)  # warm up
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        impl.design_matrix(Z, *args_packed)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=20_000)
    parser.add_argument("--modes", type=int, default=500)
    parser.add_argument("--dim", type=int, default=50)
    parser.add_argument("--degree", type=int, default=10)
    cli = parser.parse_args()

    g = (np.arange(1, cli.dim + 1) + 6.0) ** -3.0
    spectrum = CovarianceSpectrum.from_eigenvalues(g / g.sum())
    modes = degree_major_ordering(spectrum, cli.modes, cli.degree)
    rng = np.random.default_rng(0)
    Z = np.ascontiguousarray(rng.standard_normal((cli.samples, cli.dim)))
    packed = pack_modes(modes)

    print(f"design matrix: {cli.samples} samples x {len(modes)} modes "
          f"(d={cli.dim}, degree<={cli.degree})")
    t_py = bench(_fastpoly_py, Z, packed)
    print(f"  python  {t_py * 1e3:9.1f} ms")
    if _fastpoly is None:
        print("  cython  (extension not built)")
        return
    t_cy = bench(_fastpoly, Z, packed)
    print(f"  cython  {t_cy * 1e3:9.1f} ms   ({t_py / t_cy:.1f}x speedup)")
    out_py = _fastpoly_py.design_matrix(Z, *packed)
    out_cy = _fastpoly.design_matrix(Z, *packed)
    print(f"  max abs difference: {np.max(np.abs(out_py - out_cy)):.3e}")


if __name__ == "__main__":
    main()
