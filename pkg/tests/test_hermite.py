import math

import numpy as np
import pytest

import kernelcurves as kc
from kernelcurves import _fastpoly_py
from kernelcurves.hermite import (
    BACKEND,
    MultiIndex,
    design_matrix,
    hermite_1d,
    hermite_table,
    pca_coordinates,
)


def test_backend_is_reported():
    assert BACKEND in ("cython", "python")


def test_low_order_closed_forms():
    x = np.linspace(-3, 3, 41)
    np.testing.assert_allclose(hermite_1d(0, x), np.ones_like(x))
    np.testing.assert_allclose(hermite_1d(1, x), x)
    np.testing.assert_allclose(hermite_1d(2, x), (x**2 - 1) / np.sqrt(2.0))
    np.testing.assert_allclose(hermite_1d(3, x), (x**3 - 3 * x) / np.sqrt(6.0))
    assert hermite_1d(2, 1.0) == pytest.approx(0.0)


def test_orthonormal_under_gaussian_quadrature():
    # oracle: Gauss-Hermite quadrature for the probabilists' weight
    nodes, weights = np.polynomial.hermite_e.hermegauss(60)
    weights = weights / np.sqrt(2 * np.pi)
    table = hermite_table(nodes, 12)
    gram = table.T @ (weights[:, None] * table)
    np.testing.assert_allclose(gram, np.eye(13), atol=1e-10)


def test_recurrence_against_numpy_hermite_e():
    x = np.linspace(-2, 2, 17)
    for k in range(9):
        coef = np.zeros(k + 1)
        coef[k] = 1.0
        expected = np.polynomial.hermite_e.hermeval(x, coef) / math.sqrt(
            math.factorial(k)
        )
        np.testing.assert_allclose(hermite_1d(k, x), expected, rtol=1e-12)


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        hermite_1d(-1, 0.0)


def test_backends_agree():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(200)
    np.testing.assert_allclose(
        hermite_table(x, 10), _fastpoly_py.hermite_table(x, 10), rtol=1e-13
    )
    Z = rng.standard_normal((50, 4))
    modes = [
        MultiIndex(()),
        MultiIndex(((0, 1),)),
        MultiIndex(((1, 2), (3, 1))),
        MultiIndex(((0, 3), (2, 2))),
    ]
    dims, orders, ptr = [], [], [0]
    for m in modes:
        for d, k in m.entries:
            dims.append(d)
            orders.append(k)
        ptr.append(len(dims))
    args = (
        np.ascontiguousarray(Z),
        np.asarray(dims, dtype=np.int64),
        np.asarray(orders, dtype=np.int64),
        np.asarray(ptr, dtype=np.int64),
    )
    np.testing.assert_allclose(
        design_matrix(modes, Z), _fastpoly_py.design_matrix(*args), rtol=1e-13
    )


class TestMultiIndex:
    def test_entries_sorted_and_degree(self):
        alpha = MultiIndex(((3, 1), (0, 2)))
        assert alpha.entries == ((0, 2), (3, 1))
        assert alpha.degree == 3

    def test_dense_roundtrip(self):
        alpha = MultiIndex.from_dense([0, 2, 0, 1])
        assert alpha.entries == ((1, 2), (3, 1))
        np.testing.assert_array_equal(alpha.to_dense(4), [0, 2, 0, 1])

    def test_dict_roundtrip(self):
        alpha = MultiIndex(((2, 4),))
        assert MultiIndex.from_dict(alpha.to_dict()) == alpha

    def test_validation(self):
        with pytest.raises(ValueError, match="duplicate"):
            MultiIndex(((0, 1), (0, 2)))
        with pytest.raises(ValueError, match="negative"):
            MultiIndex(((-1, 1),))
        with pytest.raises(ValueError, match=">= 1"):
            MultiIndex(((0, 0),))


def test_pca_coordinates_whitens():
    rng = np.random.default_rng(7)
    g = np.array([4.0, 1.0, 0.25])
    spectrum = kc.CovarianceSpectrum.from_eigenvalues(g)
    X = kc.sample_gaussian(spectrum, 50_000, 9)
    Z = pca_coordinates(spectrum, X)
    cov = Z.T @ Z / Z.shape[0]
    np.testing.assert_allclose(cov, np.eye(3), atol=0.05)


def test_pca_coordinates_zero_variance_dimension():
    spectrum = kc.CovarianceSpectrum.from_eigenvalues([1.0, 0.0])
    X = np.array([[1.0, 2.0], [3.0, 4.0]])
    Z = pca_coordinates(spectrum, X)
    np.testing.assert_array_equal(Z[:, 1], 0.0)


def test_pca_coordinates_dim_mismatch():
    spectrum = kc.CovarianceSpectrum.from_eigenvalues([1.0, 1.0])
    with pytest.raises(ValueError, match="dimension mismatch"):
        pca_coordinates(spectrum, np.ones((3, 5)))


def test_multi_hermite_matches_design_matrix():
    rng = np.random.default_rng(11)
    Z = rng.standard_normal((30, 3))
    modes = [MultiIndex(()), MultiIndex(((0, 2), (2, 1))), MultiIndex(((1, 4),))]
    H = design_matrix(modes, Z)
    for p, alpha in enumerate(modes):
        np.testing.assert_allclose(H[:, p], kc.multi_hermite(alpha, Z), rtol=1e-14)


def test_out_of_range_mode_rejected():
    Z = np.zeros((2, 2))
    with pytest.raises(ValueError, match="out of range"):
        kc.multi_hermite(MultiIndex(((5, 1),)), Z)
    with pytest.raises(ValueError, match="out of range"):
        design_matrix([MultiIndex(((5, 1),))], Z)
