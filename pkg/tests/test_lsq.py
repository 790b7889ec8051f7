import math

import numpy as np
import pytest

from calpha.lsq import (DifferenceOperator, best_fit, best_fit_e, c_alpha_by_lsq,
                        conditioning_norm, conditioning_ratio_empirical, minimal_singular_vector,
                        residual_d, smallest_nonzero_singular, verify_block_structure)
from calpha.toeplitz import symbol_abs_power, toeplitz_min_eig_dense


def test_difference_operator_layout():
    m = DifferenceOperator(2, 5).matrix
    np.testing.assert_array_equal(m[0], [1, -2, 1, 0, 0])
    np.testing.assert_array_equal(m[2], [0, 0, 1, -2, 1])
    assert not m[3:].any()
    assert np.linalg.matrix_rank(m) == 3


@pytest.mark.parametrize("alpha", [1, 2, 3, 4])
def test_kernel_is_low_degree_polynomials(alpha):
    n = 25
    op = DifferenceOperator(alpha, n)
    j = np.arange(1, n + 1, dtype=float)
    for s in range(alpha):
        assert np.abs(op(j ** s)).max() <= 1e-12 * n ** s * 2 ** alpha
    rng = np.random.default_rng(alpha)
    for _ in range(100):
        p = rng.standard_normal(alpha)
        y = np.polynomial.polynomial.polyval(j, p)
        assert np.abs(op(y)).max() <= 1e-9 * max(1.0, np.abs(y).max())
    assert np.abs(op(j ** alpha)).max() > 0.5


def test_residual_d_examples():
    assert residual_d(2, [1, 2, 3, 4, 5]) == 0
    assert residual_d(1, [1, 2, 4]) == pytest.approx(math.sqrt(5))
    assert residual_d(2, [0, 0, 1, 0, 0]) == pytest.approx(math.sqrt(6))


def test_best_fit_examples():
    assert best_fit_e(1, [3.5] * 7) == pytest.approx(0, abs=1e-14)
    assert best_fit_e(1, [1, 2, 4]) == pytest.approx(math.sqrt(42) / 3, rel=1e-14)
    y = np.arange(1, 6, dtype=float) ** 2
    assert best_fit_e(2, y) > 0.1
    assert best_fit_e(3, y) == pytest.approx(0, abs=1e-12)


def test_best_fit_against_normal_equations_small_n():
    rng = np.random.default_rng(8)
    y = rng.standard_normal(12)
    j = np.arange(1, 13, dtype=float)
    v = np.vander(j, 3, increasing=True)
    coef, *_ = np.linalg.lstsq(v, y, rcond=None)
    assert best_fit_e(3, y) == pytest.approx(np.linalg.norm(y - v @ coef), rel=1e-10)


def test_best_fit_orthogonality_and_pythagoras():
    rng = np.random.default_rng(9)
    for alpha, n in [(1, 10), (3, 60), (4, 200)]:
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        e, fit = best_fit(alpha, y)
        j = np.arange(1, n + 1, dtype=float)
        for s in range(alpha):
            b = ((j - j.mean()) / n) ** s
            b /= np.linalg.norm(b)
            assert abs(np.vdot(b, y - fit)) <= 1e-10 * np.linalg.norm(y)
        total = np.sum(np.abs(y) ** 2)
        assert e ** 2 + np.sum(np.abs(fit) ** 2) == pytest.approx(total, rel=1e-10)


def test_conditioning_norm_examples():
    assert conditioning_norm(1, 3) == pytest.approx(1.0, rel=1e-12)
    for n in (5, 20, 77):
        assert conditioning_norm(1, n) == pytest.approx(1 / (2 * math.sin(math.pi / (2 * n))), rel=1e-10)
    dense = 1 / math.sqrt(toeplitz_min_eig_dense(symbol_abs_power(2), 4))
    assert conditioning_norm(2, 6) == pytest.approx(dense, rel=1e-10)


@pytest.mark.parametrize("alpha", [1, 2, 3])
@pytest.mark.parametrize("n", [10, 30, 100])
def test_two_path_agreement(alpha, n):
    via_svd = 1 / smallest_nonzero_singular(alpha, n)
    assert conditioning_norm(alpha, n) == pytest.approx(via_svd, rel=1e-9)


def test_block_structure_examples():
    ok, mis = verify_block_structure(1, 4)
    assert ok
    nab = DifferenceOperator(1, 4).matrix
    eig = np.sort(np.linalg.eigvalsh(nab @ nab.T))
    np.testing.assert_allclose(eig, [0, 2 - math.sqrt(2), 2, 2 + math.sqrt(2)], atol=1e-14)
    nab = DifferenceOperator(2, 6).matrix
    assert np.sum(np.abs(np.linalg.eigvalsh(nab @ nab.T)) < 1e-12) == 2
    assert verify_block_structure(3, 10)[0]


@pytest.mark.parametrize("alpha", [1, 2, 3])
@pytest.mark.parametrize("n", [8, 33, 64])
def test_block_structure(alpha, n):
    assert verify_block_structure(alpha, n)[0]


def test_ratio_examples():
    assert conditioning_ratio_empirical(1, 3, 5) == pytest.approx(1.0, rel=1e-9)
    r = conditioning_ratio_empirical(1, 100, 50) * math.pi / 100
    assert 0.95 < r < 1.05
    r = conditioning_ratio_empirical(2, 60, 50) * math.sqrt(500.5467) / 60 ** 2
    assert 0.8 < r < 1.1


@pytest.mark.parametrize("alpha, n", [(1, 20), (2, 40), (3, 30)])
def test_ratio_bracketed_by_norm(alpha, n):
    norm = conditioning_norm(alpha, n)
    r = conditioning_ratio_empirical(alpha, n, 200, seed=1)
    assert norm * (1 - 1e-6) <= r <= norm * (1 + 1e-9)


def test_e_bounded_by_norm_times_d():
    rng = np.random.default_rng(12)
    for alpha, n in [(1, 15), (2, 25), (3, 40)]:
        norm = conditioning_norm(alpha, n)
        for _ in range(200):
            y = rng.standard_normal(n) * rng.uniform(0.1, 10)
            assert best_fit_e(alpha, y) <= norm * residual_d(alpha, y) * (1 + 1e-9)


def test_minimal_singular_vector_is_orthogonal_to_kernel():
    v = minimal_singular_vector(2, 20)
    j = np.arange(1, 21, dtype=float)
    assert abs(v @ np.ones(20)) <= 1e-10 and abs(v @ j) <= 1e-9


def test_c_by_lsq_alpha1():
    est = c_alpha_by_lsq(1)
    assert est.c == pytest.approx(math.pi ** 2, rel=1e-6)
