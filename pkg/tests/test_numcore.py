import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from calpha.numcore import (LogScalar, binomial, gauss_legendre, log_factorial,
                            power_iteration, svd_small, sym_eigen)


@pytest.mark.parametrize("n, expected", [(0, 0.0), (1, 0.0), (5, math.log(120))])
def test_log_factorial_examples(n, expected):
    assert log_factorial(n) == pytest.approx(expected, rel=1e-13, abs=1e-15)


def test_log_factorial_matches_exact_integers():
    for n in (10, 100, 256, 257, 400, 1000):
        exact = math.log(math.factorial(n))
        assert abs(log_factorial(n) - exact) <= 1e-13 * exact


def test_log_factorial_consistency():
    for n in range(1, 171):
        assert math.exp(log_factorial(n) - log_factorial(n - 1)) == pytest.approx(n, rel=1e-12)


@pytest.mark.parametrize("n, k, expected", [(4, 2, 6), (2, -1, 0), (6, 3, 20), (3, 4, 0),
                                            (60, 30, math.comb(60, 30))])
def test_binomial(n, k, expected):
    assert binomial(n, k) == expected


def test_binomial_above_exact_range():
    assert binomial(70, 3) == math.comb(70, 3)


def test_gauss_legendre_examples():
    r = gauss_legendre(1, 0, 1)
    assert r.nodes.tolist() == [0.5] and r.weights.tolist() == [1.0]
    r = gauss_legendre(2, -1, 1)
    np.testing.assert_allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
    np.testing.assert_allclose(r.weights, [1, 1], rtol=1e-15)
    r = gauss_legendre(2, 0, 1)
    np.testing.assert_allclose(r.nodes, [0.5 - 0.2886751345948129, 0.5 + 0.2886751345948129], rtol=1e-15)
    np.testing.assert_allclose(r.weights, [0.5, 0.5], rtol=1e-15)


@pytest.mark.parametrize("m", [1, 2, 5, 20, 64, 300])
def test_gauss_legendre_structure(m):
    r = gauss_legendre(m, -2.0, 3.0)
    assert np.all(np.diff(r.nodes) > 0)
    assert np.all(r.weights > 0)
    assert abs(r.weights.sum() - 5.0) <= 1e-13 * 5.0
    x, w = np.polynomial.legendre.leggauss(m)
    np.testing.assert_allclose(r.nodes, 0.5 + 2.5 * x, atol=1e-13)


def test_gauss_legendre_rejects_bad_input():
    with pytest.raises(ValueError):
        gauss_legendre(0, 0, 1)
    with pytest.raises(ValueError):
        gauss_legendre(3, 1, 1)


@settings(max_examples=60, deadline=None)
@given(m=st.integers(2, 20), seed=st.integers(0, 2**32 - 1))
def test_quadrature_exactness(m, seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1, 1, 2 * m)
    lo, hi = -0.3, 1.7
    anti = np.polynomial.polynomial.polyint(coeffs)
    exact = np.polynomial.polynomial.polyval(hi, anti) - np.polynomial.polynomial.polyval(lo, anti)
    r = gauss_legendre(m, lo, hi)
    approx = r.integrate(np.polynomial.polynomial.polyval(r.nodes, coeffs))
    scale = max(abs(exact), np.abs(coeffs).sum())
    assert abs(approx - exact) <= 1e-12 * scale


@pytest.mark.parametrize("matrix, expected", [([[2.0]], [2.0]),
                                               ([[2, -1], [-1, 2]], [1.0, 3.0]),
                                               ([[0, 0], [0, 0]], [0.0, 0.0])])
def test_sym_eigen_examples(matrix, expected):
    np.testing.assert_allclose(sym_eigen(matrix)[0], expected, atol=1e-14)


@pytest.mark.parametrize("n", [1, 5, 17, 64])
def test_sym_eigen_residual(n):
    rng = np.random.default_rng(n)
    a = rng.standard_normal((n, n))
    a = a + a.T
    w, v = sym_eigen(a)
    fro = np.linalg.norm(a)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(a @ v - v * w) <= 1e-10 * fro
    assert np.abs(v.T @ v - np.eye(n)).max() <= 1e-10


def test_sym_eigen_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        sym_eigen([[1.0, 2.0], [0.0, 1.0]])


def test_power_iteration_examples():
    assert power_iteration(lambda v: v, 5, 1e-12).lambda_max == pytest.approx(1.0)
    f = np.array([1.0, 1.0])
    assert power_iteration(lambda v: (f @ v) * f, 2, 1e-12).lambda_max == pytest.approx(2.0)
    d = np.array([1.0, 2.0, 3.0])
    res = power_iteration(lambda v: d * v, 3, 1e-12)
    assert res.converged and res.lambda_max == pytest.approx(3.0, rel=1e-10)


def test_power_iteration_reports_nonconvergence():
    d = np.array([1.0, 0.999999])
    res = power_iteration(lambda v: d * v, 2, 1e-15, max_iter=3)
    assert not res.converged and res.iterations == 3


@pytest.mark.parametrize("matrix, expected", [([[1, 0], [0, 1]], [1, 1]),
                                               ([[3, 0], [0, 0]], [3, 0]),
                                               ([[1, -1, 0], [0, 1, -1]], [math.sqrt(3), 1])])
def test_svd_small_examples(matrix, expected):
    np.testing.assert_allclose(svd_small(matrix), expected, atol=1e-14)


def test_svd_small_transpose_invariance():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((7, 12))
    np.testing.assert_allclose(svd_small(a), svd_small(a.T), rtol=1e-10)


def test_svd_small_matches_gram_eigenvalues():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((9, 5))
    gram = np.sqrt(np.clip(sym_eigen(a.T @ a)[0][::-1], 0, None))
    np.testing.assert_allclose(svd_small(a), gram, rtol=1e-10)


class TestLogScalar:
    def test_zero(self):
        z = LogScalar.from_float(0.0)
        assert z.sign == 0 and z.log_abs == -math.inf and z.to_float() == 0.0

    def test_multiplication_adds_logs(self):
        a, b = LogScalar.from_float(-3.0), LogScalar.from_float(4.0)
        p = a * b
        assert p.sign == -1 and p.to_float() == pytest.approx(-12.0)
        assert (a / b).to_float() == pytest.approx(-0.75)
        assert (1 / b).to_float() == pytest.approx(0.25)

    def test_overflow_is_explicit(self):
        big = LogScalar.from_log(1000.0)
        with pytest.raises(OverflowError):
            big.to_float()
        assert big.to_json() == {"log": 1000.0, "sign": 1}

    def test_ordering(self):
        assert LogScalar.from_float(-5) < LogScalar.from_float(0) < LogScalar.from_float(1e-300)
        assert LogScalar.from_log(800) > LogScalar.from_log(799)
        assert LogScalar.from_float(-1e300) > LogScalar.from_log(800, sign=-1)
