"""Green kernel of (-1)^a u^(2a) = v with a clamped derivatives at both ends,
and its Nystrom discretization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from calpha.estimate import ConstantEstimate, Method
from calpha.numcore import LogScalar, QuadratureRule, gauss_legendre, power_iteration


def green_eval(alpha: int, x: float, y: float) -> float:
    """G_alpha(x, y) on the unit square.

    For x + y >= 1 the defining integral over t in [max(x,y), 1] is turned
    into a polynomial integral by t = 1/u. Writing s = max(x, y),
    q = min(x, y) and v = 1/s - u, it becomes

        s^(a-1) * int_0^L v^(a-1) (v q + (s-q)/s)^(a-1) dv,   L = (1-s)/s,

    whose binomial expansion has only nonnegative terms, so there is no
    cancellation however small the kernel gets. The other half of the square
    follows from the point symmetry G(x, y) = G(1-x, 1-y).
    """
    if alpha < 1:
        raise ValueError("alpha must be positive")
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError("x and y must lie in [0, 1]")
    if x + y < 1.0:
        x, y = 1.0 - x, 1.0 - y
    s, q = (x, y) if x >= y else (y, x)
    if s >= 1.0 or q <= 0.0:
        return 0.0
    ell = (1.0 - s) / s
    gap = (s - q) / s
    terms = [math.comb(alpha - 1, i) * gap ** (alpha - 1 - i) * q ** i * ell ** (alpha + i) / (alpha + i)
             for i in range(alpha)]
    integral = s ** (alpha - 1) * math.fsum(terms)
    return (x * y) ** alpha / math.factorial(alpha - 1) ** 2 * integral


def green_row_integral(alpha: int, x):
    """int_0^1 G_alpha(x, y) dy, i.e. the solution for v = 1: x^a (1-x)^a / (2a)!."""
    x = np.asarray(x, dtype=float)
    return (x * (1.0 - x)) ** alpha / math.factorial(2 * alpha)


def green_matrix(alpha: int, xs, ys=None) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    ys = xs if ys is None else np.asarray(ys, dtype=float)
    return np.array([[green_eval(alpha, float(a), float(b)) for b in ys] for a in xs])


@dataclass(frozen=True)
class NystromOperator:
    """Symmetrized Nystrom matrix sqrt(w_i) G(x_i, x_j) sqrt(w_j).

    ``diag_correction`` is the singularity-subtraction term
    int G(x_i, y) dy - sum_j w_j G(x_i, x_j); the discrete operator is
    ``matrix + diag(diag_correction)``, still symmetric. The correction
    deals with the derivative jump of G on the diagonal, which otherwise
    limits plain Gauss-Nystrom to algebraic convergence.
    """

    alpha: int
    rule: QuadratureRule
    matrix: np.ndarray
    diag_correction: np.ndarray

    @property
    def m(self) -> int:
        return len(self.rule.nodes)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v + self.diag_correction * v

    def operator_matrix(self) -> np.ndarray:
        return self.matrix + np.diag(self.diag_correction)


def build_nystrom(alpha: int, m: int) -> NystromOperator:
    if not 1 <= m <= 1024:
        raise ValueError("m must be in 1..1024")
    rule = gauss_legendre(m, 0.0, 1.0)
    x, w = rule.nodes, rule.weights
    g = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            g[i, j] = g[j, i] = green_eval(alpha, float(x[i]), float(x[j]))
    sw = np.sqrt(w)
    mat = sw[:, None] * g * sw[None, :]
    corr = green_row_integral(alpha, x) - g @ w
    return NystromOperator(alpha, rule, mat, corr)


def _nystrom_c(alpha: int, m: int, tol: float, max_iter: int):
    op = build_nystrom(alpha, m)
    res = power_iteration(op.apply, m, tol, max_iter)
    if not res.converged:
        raise ArithmeticError(f"power iteration did not converge (alpha={alpha}, m={m})")
    return LogScalar.from_float(res.lambda_max), res


def c_alpha_by_nystrom(alpha: int, m: int = 200, tol: float = 1e-13,
                       max_iter: int = 100_000) -> ConstantEstimate:
    """c_alpha = 1 / ||K_alpha||, with the norm from a Nystrom matrix."""
    if alpha < 1:
        raise ValueError("alpha must be positive")
    if m < 8:
        raise ValueError("m must be at least 8")
    lam, res = _nystrom_c(alpha, m, tol, max_iter)
    lam_coarse, _ = _nystrom_c(alpha, m // 2, tol, max_iter)
    c = 1 / lam
    c_coarse = 1 / lam_coarse
    err = abs(float(c / c_coarse) - 1.0)
    return ConstantEstimate(alpha, c, Method.NYSTROM,
                            {"m": m, "coarse_m": m // 2, "tol": tol,
                             "iterations": res.iterations, "residual": res.residual},
                            err)


def nystrom_convergence_table(alpha: int, m_list) -> list:
    """[(m, c estimate)] for ascending m."""
    m_list = list(m_list)
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ValueError("m_list must be ascending")
    rows = []
    for m in m_list:
        lam, _ = _nystrom_c(alpha, m, 1e-13, 100_000)
        rows.append((m, (1 / lam).to_float()))
    return rows


def kernel_grid(alpha: int, m: int):
    """Nodes i/(m+1), i = 1..m, and the m x m grid of G_alpha values."""
    if not 1 <= m <= 1024:
        raise ValueError("grid size must be in 1..1024")
    nodes = np.arange(1, m + 1) / (m + 1)
    return nodes, green_matrix(alpha, nodes)
