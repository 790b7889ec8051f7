"""Closed-form bounds and asymptotics for c_alpha, Rayleigh quotients, and
the discrete, clamped and periodic Wirtinger-Sobolev inequalities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from calpha.estimate import ConstantEstimate
from calpha.numcore import LogScalar, gauss_legendre, log_factorial, sym_eigen
from calpha.toeplitz import circulant_dense, symbol_diff_power


def _central_log(alpha: int) -> float:
    """ln of (4a)! (a!)^2 / ((2a)!)^2."""
    return log_factorial(4 * alpha) + 2 * log_factorial(alpha) - 2 * log_factorial(2 * alpha)


def bound_lower(alpha: int) -> LogScalar:
    if alpha < 1:
        raise ValueError("alpha must be positive")
    factor = (4 * alpha - 2) / (4 * alpha * alpha - alpha)
    return LogScalar.from_log(math.log(factor) + _central_log(alpha))


def bound_upper(alpha: int) -> LogScalar:
    if alpha < 1:
        raise ValueError("alpha must be positive")
    factor = (4 * alpha + 1) / (2 * alpha + 1)
    return LogScalar.from_log(math.log(factor) + _central_log(alpha))


def asymptotic_c(alpha: int) -> LogScalar:
    """sqrt(8 pi a) (4a/e)^(2a)."""
    if alpha < 1:
        raise ValueError("alpha must be positive")
    return LogScalar.from_log(0.5 * math.log(8 * math.pi * alpha)
                              + 2 * alpha * (math.log(4 * alpha) - 1.0))


def conjecture_value(alpha: int) -> LogScalar:
    """((a + 1) pi / 2)^(2a), the refuted guess."""
    if alpha < 1:
        raise ValueError("alpha must be positive")
    return LogScalar.from_log(2 * alpha * math.log((alpha + 1) * math.pi / 2))


@dataclass(frozen=True)
class BoundReport:
    alpha: int
    lower: LogScalar
    upper: LogScalar
    asymptotic: LogScalar
    conjecture: LogScalar
    c_ref: ConstantEstimate | None = None

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("lower bound must be below the upper bound")

    @property
    def sandwich_holds(self) -> bool | None:
        if self.c_ref is None:
            return None
        return self.lower <= self.c_ref.value <= self.upper


def bound_report(alpha: int, c_ref: ConstantEstimate | None = None) -> BoundReport:
    return BoundReport(alpha, bound_lower(alpha), bound_upper(alpha),
                       asymptotic_c(alpha), conjecture_value(alpha), c_ref)


# -- polynomial test functions -----------------------------------------------

def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _pderiv(p, times: int = 1):
    for _ in range(times):
        p = [k * c for k, c in enumerate(p)][1:] or [Fraction(0)]
    return p


def _shift_to_centered(p):
    """Coefficients in z = 2x - 1, i.e. of p((z + 1) / 2)."""
    out = [Fraction(0)]
    base = [Fraction(1)]
    half = [Fraction(1, 2), Fraction(1, 2)]
    for c in p:
        out = _padd(out, [c * b for b in base])
        base = _pmul(base, half)
    return out


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


@dataclass(frozen=True)
class TestFunction:
    """u(x) = x^a (1-x)^a p(x); ``poly_coeffs`` are p's coefficients, lowest first."""

    __test__ = False  # not a pytest class

    poly_coeffs: tuple = field(default=(1.0,))

    def u_coeffs(self, alpha: int):
        p = [Fraction(c) for c in self.poly_coeffs]
        base = [Fraction(1)]
        for _ in range(alpha):
            base = _pmul(base, [Fraction(0), Fraction(1), Fraction(-1)])
        return _pmul(base, p)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.poly_coeffs)


def _gauss_moment(p_centered, q_centered, m: int) -> float:
    """int_0^1 p q dx for polynomials given in z = 2x - 1."""
    deg = (len(p_centered) - 1) + (len(q_centered) - 1)
    if 2 * m - 1 < deg:
        raise ValueError(f"{m} nodes cannot integrate degree {deg} exactly")
    rule = gauss_legendre(m, -1.0, 1.0)
    pv = np.polynomial.polynomial.polyval(rule.nodes, [float(c) for c in p_centered])
    qv = np.polynomial.polynomial.polyval(rule.nodes, [float(c) for c in q_centered])
    return 0.5 * rule.integrate(pv * qv)


def _min_nodes(alpha: int, degree_p: int) -> int:
    return 2 * alpha + degree_p + 1


def rayleigh_quotient(alpha: int, f: TestFunction, m: int | None = None) -> float:
    """int (u^(a))^2 / int u^2 for u = x^a (1-x)^a p(x), by exact Gauss quadrature."""
    if f.is_zero():
        raise ValueError("test function is identically zero")
    u = f.u_coeffs(alpha)
    du = _pderiv(u, alpha)
    if m is None:
        m = _min_nodes(alpha, len(f.poly_coeffs) - 1)
    uc, duc = _shift_to_centered(u), _shift_to_centered(du)
    den = _gauss_moment(uc, uc, m)
    if den == 0:
        raise ZeroDivisionError("zero denominator in the Rayleigh quotient")
    return _gauss_moment(duc, duc, m) / den


def ritz_matrices(alpha: int, d: int, m: int | None = None):
    """Stiffness and mass Gram matrices of the basis x^a (1-x)^a x^i, i < d."""
    if d < 1:
        raise ValueError("basis dimension must be positive")
    if m is None:
        m = _min_nodes(alpha, d - 1)
    basis = [TestFunction(tuple([0] * i + [1])).u_coeffs(alpha) for i in range(d)]
    uc = [_shift_to_centered(b) for b in basis]
    duc = [_shift_to_centered(_pderiv(b, alpha)) for b in basis]
    stiff = np.empty((d, d))
    mass = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            stiff[i, j] = stiff[j, i] = _gauss_moment(duc[i], duc[j], m)
            mass[i, j] = mass[j, i] = _gauss_moment(uc[i], uc[j], m)
    return stiff, mass


def rayleigh_minimize(alpha: int, d: int, m: int | None = None) -> float:
    """Smallest Ritz value over span{x^a (1-x)^a x^i : i < d}; an upper bound on c_alpha."""
    if d > 12:
        raise ValueError("monomial basis is capped at d = 12 in double precision")
    stiff, mass = ritz_matrices(alpha, d, m)
    try:
        chol = np.linalg.cholesky(mass)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("mass matrix is not positive definite; basis degenerate") from exc
    linv = np.linalg.inv(chol)
    reduced = linv @ stiff @ linv.T
    reduced = 0.5 * (reduced + reduced.T)
    return float(sym_eigen(reduced)[0][0])


def legendre(alpha: int, y):
    y = np.asarray(y, dtype=float)
    p0, p1 = np.ones_like(y), y
    if alpha == 0:
        return p0
    for k in range(2, alpha + 1):
        p0, p1 = p1, ((2 * k - 1) * y * p1 - (k - 1) * p0) / k
    return p1


def legendre_norm_check(alpha: int) -> bool:
    """||P_a||^2 = 2/(2a+1) and d^a/dy^a (y^2-1)^a = 2^a a! P_a(y)."""
    if not 0 <= alpha <= 20:
        raise ValueError("alpha must be in 0..20")
    rule = gauss_legendre(alpha + 2, -1.0, 1.0)
    norm = rule.integrate(legendre(alpha, rule.nodes) ** 2)
    ok = abs(norm - 2 / (2 * alpha + 1)) <= 1e-11
    poly = [Fraction(1)]
    for _ in range(alpha):
        poly = _pmul(poly, [Fraction(-1), Fraction(0), Fraction(1)])
    rod = _pderiv(poly, alpha)
    scale = 2 ** alpha * math.factorial(alpha)
    ys = [Fraction(2 * i, 9) - 1 for i in range(10)]
    # exact rational evaluation; the monomial form cancels badly in floats
    lhs = np.array([float(sum(c * y ** k for k, c in enumerate(rod)) / scale) for y in ys])
    rhs = legendre(alpha, np.array([float(y) for y in ys]))
    return bool(ok and np.abs(lhs - rhs).max() <= 1e-11)


def discrete_wirtinger_check(alpha: int, n: int, u):
    """||C_n((1-t)^a) u||^2 against (4 sin^2(pi/n))^a (||u||^2 - |sum u|^2 / n)."""
    if n < 2 * alpha + 1:
        raise ValueError("need n >= 2 alpha + 1")
    u = np.asarray(u, dtype=complex)
    if u.shape != (n,):
        raise ValueError("u must have length n")
    cu = circulant_dense(symbol_diff_power(alpha), n) @ u
    lhs = float(np.vdot(cu, cu).real)
    rhs = (4 * math.sin(math.pi / n) ** 2) ** alpha * (
        float(np.vdot(u, u).real) - abs(u.sum()) ** 2 / n)
    return lhs, rhs, lhs >= rhs - 1e-12 * max(1.0, lhs)


def continuous_wirtinger_check(alpha: int, f: TestFunction, c_ref):
    c = c_ref.c if isinstance(c_ref, ConstantEstimate) else float(c_ref)
    ratio = rayleigh_quotient(alpha, f)
    return ratio, ratio >= c * (1 - 1e-9)


def periodic_wirtinger_check(alpha: int, fourier_coeffs: dict):
    """Parseval form: sum (2 pi |k|)^(2a) |u_k|^2 >= (2 pi)^(2a) sum_{k != 0} |u_k|^2."""
    if not any(k != 0 and c != 0 for k, c in fourier_coeffs.items()):
        raise ValueError("need a nonzero coefficient with k != 0")
    keys = sorted(fourier_coeffs)
    lhs = math.fsum((2 * math.pi * abs(k)) ** (2 * alpha) * abs(fourier_coeffs[k]) ** 2 for k in keys)
    rhs = (2 * math.pi) ** (2 * alpha) * math.fsum(abs(fourier_coeffs[k]) ** 2 for k in keys if k != 0)
    return lhs, rhs, lhs >= rhs - 1e-12 * lhs
