import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from calpha.green import (build_nystrom, c_alpha_by_nystrom, green_eval, green_matrix,
                          green_row_integral, kernel_grid, nystrom_convergence_table)

PI2 = math.pi ** 2


def integral_oracle(alpha, x, y):
    """The defining integral (valid for x + y >= 1) by adaptive quadrature."""
    s = max(x, y)
    f = lambda t: (t - x) ** (alpha - 1) * (t - y) ** (alpha - 1) / t ** (2 * alpha)
    val, _ = quad(f, s, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    return (x * y) ** alpha / math.factorial(alpha - 1) ** 2 * val


def bvp_oracle(alpha, x, y):
    """G(x, y) as the piecewise polynomial in x solving (-1)^a u^(2a) = delta_y.

    Unknowns: coefficients of two degree-(2a-1) polynomials (left/right of y).
    Conditions: a clamped derivatives at 0 and at 1, continuity of derivatives
    0..2a-2 at y, jump (-1)^a in derivative 2a-1.
    """
    mpmath.mp.dps = 40
    deg = 2 * alpha - 1
    n = 2 * (deg + 1)

    def drow(point, order):
        row = []
        for k in range(deg + 1):
            if k < order:
                row.append(mpmath.mpf(0))
            else:
                row.append(mpmath.factorial(k) / mpmath.factorial(k - order) * mpmath.mpf(point) ** (k - order))
        return row

    zeros = [mpmath.mpf(0)] * (deg + 1)
    rows, rhs = [], []
    for j in range(alpha):
        rows.append(drow(0, j) + zeros); rhs.append(0)
        rows.append(zeros + drow(1, j)); rhs.append(0)
    for j in range(2 * alpha):
        left, right = drow(y, j), drow(y, j)
        rows.append([-v for v in left] + right)
        rhs.append((-1) ** alpha if j == 2 * alpha - 1 else 0)
    sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
    coeffs = sol[:deg + 1] if x <= y else sol[deg + 1:]
    return float(sum(c * mpmath.mpf(x) ** k for k, c in enumerate(coeffs)))


def test_green_examples():
    assert green_eval(1, 0.25, 0.5) == pytest.approx(0.125, rel=1e-15)
    for a in range(1, 7):
        assert green_eval(a, 0.0, 0.3) == 0.0
    # (1/16) int_{1/2}^1 (t - 1/2)^2 / t^4 dt = 1/192
    assert green_eval(2, 0.5, 0.5) == pytest.approx(1 / 192, rel=1e-14)
    assert integral_oracle(2, 0.5, 0.5) == pytest.approx(1 / 192, rel=1e-12)


def test_alpha1_closed_form():
    rng = np.random.default_rng(0)
    for x, y in rng.uniform(0, 1, (200, 2)):
        assert green_eval(1, x, y) == pytest.approx(min(x, y) * (1 - max(x, y)), abs=1e-15)


@pytest.mark.parametrize("alpha", range(1, 7))
def test_closed_form_against_quadrature(alpha):
    rng = np.random.default_rng(100 + alpha)
    pts = rng.uniform(0, 1, (400, 2))
    pts = pts[pts.sum(axis=1) >= 1][:200]
    for x, y in pts:
        assert abs(green_eval(alpha, x, y) - integral_oracle(alpha, x, y)) <= 1e-11


@pytest.mark.parametrize("alpha", [1, 2, 3, 5])
def test_closed_form_against_bvp_solution(alpha):
    rng = np.random.default_rng(200 + alpha)
    for x, y in rng.uniform(0, 1, (25, 2)):
        assert abs(green_eval(alpha, x, y) - bvp_oracle(alpha, x, y)) <= 1e-13


@pytest.mark.parametrize("alpha", range(1, 7))
def test_kernel_symmetries(alpha):
    grid = np.linspace(0, 1, 41)
    g = green_matrix(alpha, grid)
    assert np.abs(g - g.T).max() <= 1e-11
    assert np.abs(g - g[::-1, ::-1]).max() <= 1e-11
    assert np.abs(g[0]).max() == 0 and np.abs(g[-1]).max() == 0
    assert g.min() >= -1e-11


def test_high_alpha_kernel_is_positive_and_accurate():
    # terms of the expansion are all nonnegative, so tiny values keep full relative accuracy
    for alpha in (10, 20):
        for x, y in [(0.5, 0.5), (0.9, 0.95), (0.6, 0.99)]:
            assert green_eval(alpha, x, y) == pytest.approx(integral_oracle(alpha, x, y), rel=1e-9)


def test_row_integral_is_solution_for_unit_load():
    for alpha in (1, 2, 4):
        for x in (0.1, 0.5, 0.77):
            val, _ = quad(lambda y: green_eval(alpha, x, y), 0, 1, points=[x], epsabs=1e-16, epsrel=1e-13)
            assert green_row_integral(alpha, x) == pytest.approx(val, rel=1e-10)


def test_build_nystrom_examples():
    op = build_nystrom(1, 1)
    assert op.matrix.tolist() == [[0.25]]
    op = build_nystrom(1, 20)
    assert np.trace(op.matrix) == pytest.approx(1 / 6, abs=1e-10)
    op = build_nystrom(2, 2)
    assert op.matrix.shape == (2, 2) and np.all(np.diag(op.matrix) > 0)
    assert op.matrix[0, 1] == op.matrix[1, 0]


@pytest.mark.parametrize("alpha, m", [(1, 50), (3, 80), (6, 64)])
def test_nystrom_matrix_invariants(alpha, m):
    op = build_nystrom(alpha, m)
    fro = np.linalg.norm(op.matrix)
    assert np.abs(op.matrix - op.matrix.T).max() <= 1e-13 * fro
    assert np.linalg.eigvalsh(op.matrix)[0] >= -1e-12 * fro
    full = op.operator_matrix()
    assert np.allclose(full, full.T, rtol=0, atol=1e-13 * fro)


def test_nystrom_rayleigh_bound():
    op = build_nystrom(2, 100)
    lam = 1 / c_alpha_by_nystrom(2, 100).c
    rng = np.random.default_rng(5)
    for _ in range(100):
        v = rng.standard_normal(100)
        v /= np.linalg.norm(v)
        assert v @ op.apply(v) <= lam + 1e-12


def test_c_nystrom_examples():
    e1 = c_alpha_by_nystrom(1, 200, 1e-13)
    assert abs(e1.c / PI2 - 1) <= 1e-8
    e2 = c_alpha_by_nystrom(2, 200, 1e-13)
    assert abs(e2.c / 500.5467 - 1) <= 1e-4
    e3 = c_alpha_by_nystrom(3, 300, 1e-13)
    assert abs(e3.c - 61529) <= 2
    for e in (e1, e2, e3):
        assert e.error_estimate >= 0 and e.params["coarse_m"] == e.params["m"] // 2


@pytest.mark.parametrize("m", [50, 64, 100, 150])
def test_nystrom_alpha1_consistency(m):
    assert abs(c_alpha_by_nystrom(1, m).c / PI2 - 1) <= 1e-6


def test_nystrom_rejects_tiny_m():
    with pytest.raises(ValueError):
        c_alpha_by_nystrom(1, 4)


def test_convergence_table():
    rows = nystrom_convergence_table(1, [25, 50, 100])
    assert abs(rows[-1][1] - PI2) <= 1e-6
    c_inf = rows[-1][1]
    errs = [abs(c - c_inf) for _, c in rows]
    assert errs[0] >= errs[1] >= errs[2]
    (m, c), = nystrom_convergence_table(1, [8])
    assert m == 8 and 0 < c < math.inf
    rows = nystrom_convergence_table(2, [50, 100, 200])
    deltas = [abs(b[1] - a[1]) for a, b in zip(rows, rows[1:])]
    assert deltas[1] < deltas[0]


def test_kernel_grid_nodes():
    nodes, g = kernel_grid(1, 3)
    np.testing.assert_allclose(nodes, [0.25, 0.5, 0.75])
    assert g[1, 1] == 0.25
