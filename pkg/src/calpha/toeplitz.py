"""Laurent symbols, banded Toeplitz and circulant matrices.

Toeplitz entry (j, k) is ``a_{j-k}``. Minimal eigenvalues are found by
bisection on inertia counts from a banded LDL^T factorization, so the cost
per shift is O(n r^2) and dimensions in the hundreds stay cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from calpha.estimate import ConstantEstimate, Method
from calpha.numcore import LogScalar, binomial, sym_eigen


class IndefiniteError(ArithmeticError):
    """A matrix that should be positive definite failed to factor."""


class InsufficientGridError(ValueError):
    pass


@dataclass(frozen=True)
class LaurentSymbol:
    """Finitely many Fourier coefficients ``a_k``, ``-r <= k <= r``."""

    coeffs: dict

    def __post_init__(self):
        clean = {int(k): float(v) for k, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", clean or {0: 0.0})

    @property
    def r(self) -> int:
        return max(abs(k) for k in self.coeffs)

    def __getitem__(self, k: int) -> float:
        return self.coeffs.get(k, 0.0)

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return all(abs(v - self[-k]) <= tol * max(1.0, abs(v)) for k, v in self.coeffs.items())

    def __call__(self, theta):
        """Evaluate sum a_k e^{ik theta} at angles ``theta``."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for k in sorted(self.coeffs):
            out = out + self.coeffs[k] * np.exp(1j * k * theta)
        return out

    def at_one(self) -> float:
        return math.fsum(self.coeffs.values())

    def l1_norm(self) -> float:
        return math.fsum(abs(v) for v in self.coeffs.values())

    def __mul__(self, other: LaurentSymbol) -> LaurentSymbol:
        out: dict = {}
        for j, a in self.coeffs.items():
            for k, b in other.coeffs.items():
                out[j + k] = out.get(j + k, 0.0) + a * b
        return LaurentSymbol(out)

    def scaled(self, s: float) -> LaurentSymbol:
        return LaurentSymbol({k: s * v for k, v in self.coeffs.items()})

    def band(self) -> np.ndarray:
        """(a_0, a_1, ..., a_r) of a Hermitian symbol."""
        return np.array([self[k] for k in range(self.r + 1)])

    def min_on_circle(self, samples: int = 1024) -> float:
        theta = 2 * np.pi * np.arange(samples) / samples
        return float(self(theta).real.min())


def symbol_abs_power(alpha: int) -> LaurentSymbol:
    """Coefficients of |1 - t|^(2 alpha)."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return LaurentSymbol({k: (-1) ** (k % 2) * binomial(2 * alpha, alpha + k)
                          for k in range(-alpha, alpha + 1)})


def symbol_diff_power(alpha: int) -> LaurentSymbol:
    """Coefficients of (1 - t)^alpha."""
    if alpha < 1:
        raise ValueError("alpha must be positive")
    return LaurentSymbol({k: (-1) ** (k % 2) * binomial(alpha, k) for k in range(alpha + 1)})


def symbol_with_weight(alpha: int, b: LaurentSymbol) -> tuple[LaurentSymbol, float]:
    """|1 - t|^(2 alpha) b(t), together with b(1)."""
    if not b.is_hermitian(1e-14):
        raise ValueError("weight symbol must be Hermitian")
    if b.min_on_circle(1024) <= 0:
        raise ValueError("weight symbol is not positive on the unit circle")
    return symbol_abs_power(alpha) * b, b.at_one()


def toeplitz_dense(symbol: LaurentSymbol, n: int) -> np.ndarray:
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    out = np.zeros((n, n))
    for k, v in symbol.coeffs.items():
        out[diff == k] = v
    return out


def circulant_dense(symbol: LaurentSymbol, n: int) -> np.ndarray:
    """C_n(a): first row (a_0, a_{-1}, ..., a_{-r}, 0, ..., 0, a_r, ..., a_1)."""
    if n < 2 * symbol.r + 1:
        raise ValueError("circulant needs n >= 2r + 1")
    j = np.arange(n)
    diff = (j[:, None] - j[None, :]) % n
    out = np.zeros((n, n))
    for k, v in symbol.coeffs.items():
        out[diff == k % n] += v
    return out


# -- banded LDL^T ----------------------------------------------------------

def _band_ldl(band: np.ndarray, n: int, shift: float = 0.0):
    """LDL^T of the symmetric Toeplitz matrix with diagonals ``band`` minus shift*I.

    Returns (d, L) with L[i, q] the multiplier of row i on column i-q-1.
    Pivots smaller than ``pivmin`` (a rounding-level perturbation of the
    matrix) are replaced by -pivmin, as in Sturm-count bisection; this keeps
    the multipliers finite and only affects counts at the resolution limit.
    """
    r = len(band) - 1
    d = np.empty(n)
    # lower[i, q] = L[i, i-1-q]
    lower = np.zeros((n, max(r, 1)))
    pivmin = 1e-3 * np.finfo(float).eps * max(float(np.abs(band).sum()), 1.0)
    for i in range(n):
        lo = max(0, i - r)
        width = i - lo
        if width:
            # row i of L restricted to columns lo..i-1 (reversed storage)
            li = lower[i, :width][::-1]
            dd = d[lo:i]
            d_i = band[0] - shift - float(np.dot(li * li, dd))
        else:
            d_i = band[0] - shift
        if abs(d_i) < pivmin:
            d_i = -pivmin
        d[i] = d_i
        # multipliers for rows i+1..i+r below this pivot
        for q in range(1, min(r, n - 1 - i) + 1):
            row = i + q
            s = band[q]
            lo_row = max(0, row - r)
            if lo_row < i:
                # sum over columns lo_row..i-1 of L[row, c] L[i, c] d_c
                cols = np.arange(lo_row, i)
                lr = lower[row, row - 1 - cols]
                lc = lower[i, i - 1 - cols]
                s -= float(np.dot(lr * lc, d[cols]))
            lower[row, q - 1] = s / d_i
    return d, lower


def inertia_below(symbol: LaurentSymbol, n: int, sigma: float) -> int:
    """Number of eigenvalues of T_n(symbol) below sigma."""
    d, _ = _band_ldl(symbol.band(), n, sigma)
    return int(np.count_nonzero(d < 0))


def _band_solve(d: np.ndarray, lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = len(d)
    r = lower.shape[1]
    x = np.array(rhs, dtype=float, copy=True)
    for i in range(1, n):
        lo = max(0, i - r)
        if i > lo:
            x[i] -= lower[i, :i - lo][::-1] @ x[lo:i]
    x /= d if x.ndim == 1 else d[:, None]
    for i in range(n - 2, -1, -1):
        hi = min(n - 1, i + r)
        if hi > i:
            rows = np.arange(i + 1, hi + 1)
            x[i] -= lower[rows, rows - 1 - i] @ x[i + 1:hi + 1]
    return x


def toeplitz_min_eig(symbol: LaurentSymbol, n: int, rel_width: float = 1e-12) -> float:
    """Smallest eigenvalue of T_n(symbol) by inertia bisection plus one inverse-iteration step."""
    if n < 1:
        raise ValueError("n must be positive")
    if not symbol.is_hermitian(1e-14):
        raise ValueError("symbol must be Hermitian")
    if symbol.r > n:
        raise ValueError("band half-width exceeds n")
    band = symbol.band()
    if n == 1:
        return float(band[0])
    # Gershgorin below, a diagonal entry above
    lo = band[0] - 2.0 * float(np.abs(band[1:]).sum())
    hi = float(band[0])
    if inertia_below(symbol, n, hi) == 0:
        # lambda_min == a_0 exactly (e.g. zero off-diagonals)
        return hi
    eps_abs = 4 * np.finfo(float).eps * float(np.abs(band).sum())
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if inertia_below(symbol, n, mid) >= 1:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rel_width * max(abs(lo), abs(hi)) or hi - lo <= 1e-3 * eps_abs:
            break
    lam = 0.5 * (lo + hi)
    # inverse-iteration polish from just below the bracket
    shift = lo - (hi - lo)
    d, lower = _band_ldl(band, n, shift)
    x = _band_solve(d, lower, np.ones(n))
    x = _band_solve(d, lower, x / np.linalg.norm(x))
    x /= np.linalg.norm(x)
    rq = float(x @ _toeplitz_matvec(band, x))
    if lo - eps_abs <= rq <= hi + eps_abs:
        lam = rq
    sampled_positive = symbol.min_on_circle(256) > 0
    if sampled_positive and lam <= 0:
        raise IndefiniteError(f"lambda_min <= 0 for a positive symbol at n={n}; reduce n")
    return lam


def _toeplitz_matvec(band: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = band[0] * x
    for k in range(1, len(band)):
        y[k:] += band[k] * x[:-k]
        y[:-k] += band[k] * x[k:]
    return y


def toeplitz_min_eig_dense(symbol: LaurentSymbol, n: int) -> float:
    """Dense-solver oracle for small n."""
    return float(sym_eigen(toeplitz_dense(symbol, n))[0][0])


def c_alpha_by_extrapolation(alpha: int, n_grid=None) -> ConstantEstimate:
    """n^(2 alpha) lambda_min(T_n(|1-t|^(2 alpha))) extrapolated in 1/n."""
    if alpha not in (1, 2, 3, 4):
        raise ValueError("the Toeplitz route supports alpha in 1..4")
    if n_grid is None:
        n_grid = {1: (64, 128, 256, 512), 2: (32, 64, 128, 256),
                  3: (16, 32, 64), 4: (16, 32, 64)}[alpha]
    n_grid = sorted(int(n) for n in n_grid)
    symbol = symbol_abs_power(alpha)
    guard = 1e-13 * symbol.l1_norm()
    ns, scaled = [], []
    for n in n_grid:
        if n < 4 * alpha:
            raise ValueError(f"grid dimension {n} is below 4*alpha")
        lam = toeplitz_min_eig(symbol, n)
        if lam < guard:
            continue
        ns.append(n)
        scaled.append(n ** (2 * alpha) * lam)
    if len(ns) < 3:
        raise InsufficientGridError(f"only {len(ns)} grid sizes survived the conditioning guard")
    if any(b < a for a, b in zip(scaled, scaled[1:])):
        raise ArithmeticError("scaled minimal eigenvalues are not increasing; extrapolation aborted")
    table = richardson_table(ns, scaled)
    value = table[-1][-1]
    previous = table[-2][-1]
    err = abs(value - previous) / abs(value)
    return ConstantEstimate(alpha, LogScalar.from_float(value), Method.TOEPLITZ,
                            {"n_grid": ns, "scaled": scaled,
                             "first_order": table[1]}, err)


def richardson_first_order(ns, values) -> list:
    """Eliminate a c/n error term between consecutive grid points."""
    out = []
    for (n0, s0), (n1, s1) in zip(zip(ns, values), zip(ns[1:], values[1:])):
        out.append((n1 * s1 - n0 * s0) / (n1 - n0))
    return out


def richardson_table(ns, values) -> list:
    """Richardson tableau in h = 1/n.

    Column k has the terms h, ..., h^k removed; column 1 is
    :func:`richardson_first_order`. The last entry of the last column is the
    extrapolated limit.
    """
    h = [1.0 / n for n in ns]
    table = [list(values)]
    for k in range(1, len(ns)):
        prev = table[-1]
        table.append([(h[i] * prev[i + 1] - h[i + k] * prev[i]) / (h[i] - h[i + k])
                      for i in range(len(prev) - 1)])
    return table


def circulant_singular_values(alpha: int, n: int) -> np.ndarray:
    """|1 - omega_n^j|^alpha for j = 1..n.

    The law holds for every n >= 1; only the explicit matrix
    (:func:`circulant_dense`) needs n >= 2 alpha + 1.
    """
    if n < 1:
        raise ValueError("n must be positive")
    # fold j to min(j, n - j): sin near pi loses relative accuracy
    s = np.array([(4.0 * math.sin(math.pi * min(j, n - j) / n) ** 2) ** (alpha / 2)
                  for j in range(1, n + 1)])
    s[-1] = 0.0
    return s


def smallest_nonzero_circulant_sv(alpha: int, n: int) -> float:
    return (4.0 * math.sin(math.pi / n) ** 2) ** (alpha / 2)


class BandFactor:
    """Cached LDL^T of T_n(symbol) for repeated solves."""

    def __init__(self, symbol: LaurentSymbol, n: int):
        self.band = symbol.band()
        self.n = n
        self.d, self.lower = _band_ldl(self.band, n)
        if np.any(self.d <= 0):
            raise IndefiniteError("Toeplitz matrix is numerically indefinite")

    def solve(self, rhs):
        return _band_solve(self.d, self.lower, rhs)


def toeplitz_inverse_entries(symbol: LaurentSymbol, n: int, pairs) -> list:
    """Entries (j, k), 1-based, of T_n(symbol)^{-1}."""
    fac = BandFactor(symbol, n)
    cols = sorted({k for _, k in pairs})
    rhs = np.zeros((n, len(cols)))
    for c, k in enumerate(cols):
        rhs[k - 1, c] = 1.0
    x = fac.solve(rhs)
    resid = np.column_stack([_toeplitz_matvec(fac.band, x[:, c]) for c in range(len(cols))]) - rhs
    if np.abs(resid).max() > 1e-10 * max(1.0, np.abs(x).max()):
        raise IndefiniteError("band solve residual too large")
    index = {k: c for c, k in enumerate(cols)}
    return [float(x[j - 1, index[k]]) for j, k in pairs]


def ceil_index(n: int, z: float) -> int:
    """Smallest integer in 1..n that is >= n z."""
    return min(n, max(1, math.ceil(n * z)))


def compare_inverse_to_green(alpha: int, n: int, grid_m: int, kernel=None) -> float:
    """sup over a grid of |n^(1-2a) [T_n^{-1}]_{[nx],[ny]} - G_a(x, y)|.

    ``kernel(x, y, j, k)`` replaces the scaled inverse entries; used to
    self-check the comparison machinery.
    """
    from calpha.green import green_eval

    if alpha not in (1, 2):
        raise ValueError("comparison supported for alpha in {1, 2}")
    pts = [(i + 1) / (grid_m + 1) for i in range(grid_m)]
    idx = [ceil_index(n, z) for z in pts]
    if kernel is None:
        fac = BandFactor(symbol_abs_power(alpha), n)
        cols = sorted(set(idx))
        rhs = np.zeros((n, len(cols)))
        for c, k in enumerate(cols):
            rhs[k - 1, c] = 1.0
        x = fac.solve(rhs)
        where = {k: c for c, k in enumerate(cols)}

        def kernel(xi, yi, j, k):  # noqa: E306
            return n ** (1 - 2 * alpha) * x[j - 1, where[k]]

    err = 0.0
    for xi, j in zip(pts, idx):
        for yi, k in zip(pts, idx):
            err = max(err, abs(kernel(xi, yi, j, k) - green_eval(alpha, xi, yi)))
    return err


def gram_defect(alpha: int, n: int):
    """T_n(b) - T_n(a)^T T_n(a) for a = (1-t)^alpha, b = |1-t|^(2 alpha).

    Returns (block, corner, offblock_max); the corner holding the defect is
    detected, not assumed.
    """
    if n < 2 * alpha + 2:
        raise ValueError("need n >= 2 alpha + 2")
    ta = toeplitz_dense(symbol_diff_power(alpha), n)
    tb = toeplitz_dense(symbol_abs_power(alpha), n)
    defect = tb - ta.T @ ta
    corners = {
        "top-left": (slice(0, alpha), slice(0, alpha)),
        "top-right": (slice(0, alpha), slice(n - alpha, n)),
        "bottom-left": (slice(n - alpha, n), slice(0, alpha)),
        "bottom-right": (slice(n - alpha, n), slice(n - alpha, n)),
    }
    best = None
    for name, sl in corners.items():
        rest = defect.copy()
        rest[sl] = 0.0
        off = float(np.abs(rest).max())
        if best is None or off < best[2]:
            best = (defect[sl].copy(), name, off)
    return best
