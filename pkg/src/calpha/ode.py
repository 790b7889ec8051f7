"""Minimal eigenvalue of (-1)^a u^(2a) = lambda u, u^(j)(0) = u^(j)(1) = 0 for j < a,
located as the first zero of the characteristic determinant."""

from __future__ import annotations

import math

import numpy as np

from calpha.estimate import ConstantEstimate, Method
from calpha.numcore import LogScalar


class PairingError(RuntimeError):
    pass


class NoSignChangeError(RuntimeError):
    pass


class OutOfBoundsError(RuntimeError):
    pass


def unit_roots(alpha: int) -> np.ndarray:
    """zeta_k = exp(i pi (a + 2k) / (2a)), k = 0..2a-1; each satisfies zeta^(2a) = (-1)^a."""
    k = np.arange(2 * alpha)
    return np.exp(1j * np.pi * (alpha + 2 * k) / (2 * alpha))


def char_roots(alpha: int, lam: float) -> np.ndarray:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return lam ** (1.0 / (2 * alpha)) * unit_roots(alpha)


def _conjugate_pairs(zeta: np.ndarray):
    """Split root indices into real roots and (upper, lower) conjugate pairs."""
    tol = 1e-12
    real, pairs, used = [], [], set()
    for k, z in enumerate(zeta):
        if k in used:
            continue
        if abs(z.imag) <= tol:
            real.append(k)
            used.add(k)
            continue
        partner = [j for j in range(len(zeta))
                   if j not in used and j != k and abs(zeta[j] - z.conjugate()) <= 1e-10]
        if len(partner) != 1:
            raise PairingError(f"root {z} has no unique conjugate partner")
        j = partner[0]
        up, lo = (k, j) if z.imag > 0 else (j, k)
        pairs.append((up, lo))
        used.update((k, j))
    return real, pairs


def boundary_matrix(alpha: int, lam: float, rescale: bool = True) -> np.ndarray:
    """2a x 2a complex matrix of the boundary conditions on the basis e^{mu_k x}.

    Row j (j < a) is the j-th derivative at 0, row a + j at 1. Derivative
    rows are divided by r^j (r = lambda^(1/2a)) and column k by
    e^{max(0, Re mu_k)} when ``rescale``; both are positive factors and leave
    the zeros of the determinant alone.
    """
    r = lam ** (1.0 / (2 * alpha))
    zeta = unit_roots(alpha)
    mu = r * zeta
    j = np.arange(alpha)[:, None]
    powers = zeta[None, :] ** j
    col = np.exp(mu - np.maximum(0.0, mu.real)) if rescale else np.exp(mu)
    top = powers * (np.exp(-np.maximum(0.0, mu.real)) if rescale else 1.0)
    return np.vstack([top, powers * col[None, :]])


def _realify(mat: np.ndarray, alpha: int) -> np.ndarray:
    zeta = unit_roots(alpha)
    real, pairs = _conjugate_pairs(zeta)
    cols = []
    for k in real:
        cols.append(mat[:, k].real)
    for up, _ in pairs:
        cols.append(mat[:, up].real)
        cols.append(mat[:, up].imag)
    return np.column_stack(cols)


def char_det(alpha: int, lam: float, rescale: bool = True) -> float:
    """Real detector whose sign changes mark eigenvalues.

    Each conjugate column pair (c, conj c) is replaced by (Re c, Im c); that
    scales the determinant by a unimodular constant times 2^-p, which is
    undone so |char_det| = |det| of the complex boundary matrix.
    """
    mat = boundary_matrix(alpha, lam, rescale)
    real_mat = _realify(mat, alpha)
    _, pairs = _conjugate_pairs(unit_roots(alpha))
    return float(np.linalg.det(real_mat)) * 2.0 ** len(pairs)


def c_alpha_by_ode(alpha: int, scan_lo: float | None = None, scan_hi: float | None = None,
                   scan_points: int = 2000) -> ConstantEstimate:
    """First sign change of char_det on a log grid, refined by bisection."""
    from calpha.wirtinger import bound_lower, bound_upper

    lower = bound_lower(alpha).to_float()
    upper = bound_upper(alpha).to_float()
    lo_default = 0.5 * lower
    hi_default = 1.1 * upper
    scan_lo = lo_default if scan_lo is None else scan_lo
    scan_hi = hi_default if scan_hi is None else scan_hi
    if not 0 < scan_lo < scan_hi:
        raise ValueError("need 0 < scan_lo < scan_hi")
    grid = np.geomspace(scan_lo, scan_hi, scan_points)
    vals = [char_det(alpha, float(g)) for g in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            bracket = (grid[i], grid[i])
            break
        if vals[i] * vals[i + 1] < 0:
            bracket = (float(grid[i]), float(grid[i + 1]))
            break
    if bracket is None:
        raise NoSignChangeError(f"char_det has no sign change on [{scan_lo}, {scan_hi}]")
    a, b = bracket
    fa = char_det(alpha, a)
    while b - a > 1e-12 * b:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = char_det(alpha, mid)
        if fm == 0.0:
            a = b = mid
            break
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    root = 0.5 * (a + b)
    if not lower <= root <= upper:
        raise OutOfBoundsError(f"root {root} lies outside the theorem bounds [{lower}, {upper}]")
    return ConstantEstimate(alpha, LogScalar.from_float(root), Method.ODE,
                            {"scan_lo": scan_lo, "scan_hi": scan_hi, "scan_points": scan_points},
                            (b - a) / root)


def eigenfunction(alpha: int, lam: float):
    """Null vector of the boundary matrix at lam, as (mu, A) with u(x) = sum A_k e^{mu_k x}."""
    mat = boundary_matrix(alpha, lam, rescale=True)
    _, _, vh = np.linalg.svd(mat)
    a_scaled = vh[-1].conj()
    mu = char_roots(alpha, lam)
    # undo the column scaling
    amp = a_scaled * np.exp(-np.maximum(0.0, mu.real))
    return mu, amp


def eigenfunction_derivatives(mu, amp, x, order: int):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return (amp[None, :] * mu[None, :] ** order * np.exp(np.outer(x, mu))).sum(axis=1)
