"""Shared numerical primitives.

Everything here is a pure function of its inputs. Large factorial
expressions go through :class:`LogScalar` so that ratios of quantities like
``(4a)!`` stay representable well past the double-precision range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

# Largest natural log whose exp() is still a finite double.
_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class LogScalar:
    """A real number stored as ``sign * exp(log_abs)``."""

    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0 and self.log_abs != -math.inf:
            object.__setattr__(self, "log_abs", -math.inf)

    @classmethod
    def from_float(cls, x: float) -> LogScalar:
        if x == 0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, log_abs: float, sign: int = 1) -> LogScalar:
        return cls(sign, log_abs)

    def __mul__(self, other):
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        if self.sign == 0 or other.sign == 0:
            return LogScalar(0, -math.inf)
        return LogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScalar")
        if self.sign == 0:
            return self
        return LogScalar(self.sign * other.sign, self.log_abs - other.log_abs)

    def __rtruediv__(self, other):
        return LogScalar.from_float(float(other)) / self

    def __pow__(self, p: float) -> LogScalar:
        if self.sign < 0:
            raise ValueError("power of a negative LogScalar")
        if self.sign == 0:
            return self
        return LogScalar(1, self.log_abs * p)

    def __float__(self) -> float:
        return self.to_float()

    def to_float(self) -> float:
        """Convert to a plain double; raises OverflowError past the exponent range."""
        if self.sign == 0:
            return 0.0
        if self.log_abs > _LOG_MAX:
            raise OverflowError(f"exp({self.log_abs}) overflows a double")
        return self.sign * math.exp(self.log_abs)

    def _cmp_key(self):
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.log_abs)

    def __lt__(self, other):
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        return self._cmp_key() < other._cmp_key()

    def __le__(self, other):
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        return self._cmp_key() <= other._cmp_key()

    def __gt__(self, other):
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        return other < self

    def __ge__(self, other):
        if not isinstance(other, LogScalar):
            other = LogScalar.from_float(float(other))
        return other <= self

    def to_json(self):
        """Plain float when representable, else ``{"log": ..., "sign": ...}``."""
        try:
            return self.to_float()
        except OverflowError:
            return {"log": self.log_abs, "sign": self.sign}


def log_factorial(n: int) -> float:
    """ln(n!), summed exactly for n <= 256 and via lgamma above."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= 256:
        return math.fsum(math.log(k) for k in range(2, n + 1))
    return math.lgamma(n + 1.0)


def binomial(n: int, k: int) -> float:
    if k < 0 or k > n:
        return 0.0
    if n <= 60:
        return float(math.comb(n, k))
    return float(round(math.exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k))))


class QuadratureRule(NamedTuple):
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, values) -> float:
        # fixed-order summation for reproducibility
        return math.fsum(np.asarray(self.weights) * np.asarray(values))


def _legendre_and_derivative(m: int, x: float) -> tuple[float, float]:
    p0, p1 = 1.0, x
    for k in range(2, m + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    if m == 0:
        return 1.0, 0.0
    dp = m * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def gauss_legendre(m: int, lo: float = -1.0, hi: float = 1.0) -> QuadratureRule:
    """m-point Gauss-Legendre rule on [lo, hi], nodes by Newton iteration."""
    if m < 1:
        raise ValueError("m must be positive")
    if not lo < hi:
        raise ValueError("need lo < hi")
    x = np.empty(m)
    w = np.empty(m)
    for i in range((m + 1) // 2):
        z = math.cos(math.pi * (i + 0.75) / (m + 0.5))
        for _ in range(100):
            p, dp = _legendre_and_derivative(m, z)
            dz = p / dp
            z -= dz
            if abs(dz) <= 1e-15:
                break
        else:
            raise RuntimeError(f"Newton iteration for Gauss-Legendre node {i} of {m} did not converge")
        p, dp = _legendre_and_derivative(m, z)
        wz = 2.0 / ((1.0 - z * z) * dp * dp)
        x[i], x[m - 1 - i] = -z, z
        w[i] = w[m - 1 - i] = wz
    if m % 2:
        x[m // 2] = 0.0
    half = 0.5 * (hi - lo)
    return QuadratureRule(lo + half * (x + 1.0), half * w, m)


def sym_eigen(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of a symmetric matrix."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(np.abs(a).max(initial=0.0), 1e-300)
    if np.abs(a - a.T).max(initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    return w, v


class PowerResult(NamedTuple):
    lambda_max: float
    residual: float
    converged: bool
    iterations: int
    vector: np.ndarray


def power_iteration(apply: Callable[[np.ndarray], np.ndarray], m: int,
                    tol: float = 1e-13, max_iter: int = 10_000) -> PowerResult:
    """Dominant eigenvalue of a symmetric PSD operator given as a matvec.

    Starts from the normalized all-ones vector. Stops when successive
    Rayleigh quotients agree to ``tol`` relative; if that never happens the
    last iterate comes back with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.full(m, 1.0 / math.sqrt(m))
    lam_old = None
    lam = 0.0
    for it in range(1, max_iter + 1):
        av = np.asarray(apply(v), dtype=float)
        lam = float(v @ av)
        nrm = float(np.linalg.norm(av))
        if nrm == 0.0:
            return PowerResult(0.0, 0.0, True, it, v)
        residual = float(np.linalg.norm(av - lam * v))
        if lam_old is not None and abs(lam - lam_old) <= tol * abs(lam_old):
            return PowerResult(lam, residual, True, it, v)
        lam_old = lam
        v = av / nrm
    return PowerResult(lam, residual, False, max_iter, v)


def svd_small(matrix) -> np.ndarray:
    """Singular values, descending."""
    a = np.asarray(matrix, dtype=float)
    if max(a.shape) > 512:
        raise ValueError("svd_small is limited to 512 rows/columns")
    # LAPACK SVD rather than Gram eigenvalues: squaring would cost half the
    # digits of the smallest singular value.
    return np.linalg.svd(a, compute_uv=False)


def svd_small_vectors(matrix):
    a = np.asarray(matrix, dtype=float)
    if max(a.shape) > 512:
        raise ValueError("svd_small is limited to 512 rows/columns")
    return np.linalg.svd(a)
