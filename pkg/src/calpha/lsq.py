"""Testing whether samples y_1..y_n come from a polynomial of degree < a.

D(y) is the norm of the a-th differences, E(y) the least-squares distance
to such polynomials. The worst ratio E/D is the norm of the pseudoinverse of
the difference operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from calpha.estimate import ConstantEstimate, Method
from calpha.numcore import LogScalar, binomial, svd_small, svd_small_vectors, sym_eigen
from calpha.toeplitz import symbol_abs_power, toeplitz_dense, toeplitz_min_eig, toeplitz_min_eig_dense


class StructureViolationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DifferenceOperator:
    alpha: int
    n: int

    def __post_init__(self):
        if self.n <= self.alpha:
            raise ValueError("need n > alpha")

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([(-1) ** i * binomial(self.alpha, i) for i in range(self.alpha + 1)])

    @property
    def matrix(self) -> np.ndarray:
        a, n = self.alpha, self.n
        out = np.zeros((n, n))
        c = self.coeffs
        for k in range(n - a):
            out[k, k:k + a + 1] = c
        return out

    def deltas(self, y) -> np.ndarray:
        y = np.asarray(y)
        c = self.coeffs
        m = self.n - self.alpha
        return sum(c[i] * y[i:i + m] for i in range(self.alpha + 1))

    def __call__(self, y) -> np.ndarray:
        d = self.deltas(y)
        return np.concatenate([d, np.zeros(self.alpha, dtype=d.dtype)])


def residual_d(alpha: int, y) -> float:
    y = np.asarray(y)
    d = DifferenceOperator(alpha, len(y)).deltas(y)
    return float(np.sqrt(np.sum(np.abs(d) ** 2)))


def poly_basis(alpha: int, n: int) -> np.ndarray:
    """n x a matrix with orthonormal columns spanning {p(1..n) : deg p < a}."""
    if n < alpha:
        raise ValueError("need n >= alpha")
    j = np.arange(1, n + 1, dtype=float)
    t = (j - j.mean()) / max(1.0, (n - 1) / 2.0)
    q = np.empty((n, alpha))
    for k in range(alpha):
        v = t ** k
        # Gram-Schmidt, twice for stability
        for _ in range(2):
            if k:
                v = v - q[:, :k] @ (q[:, :k].T @ v)
        q[:, k] = v / np.linalg.norm(v)
    return q


def best_fit(alpha: int, y):
    """(E(y), fitted samples). Complex y is fitted part by part with the real basis."""
    y = np.asarray(y)
    q = poly_basis(alpha, len(y))
    fit = q @ (q.T @ y)
    resid = y - fit
    return float(np.sqrt(np.sum(np.abs(resid) ** 2))), fit


def best_fit_e(alpha: int, y) -> float:
    return best_fit(alpha, y)[0]


def smallest_nonzero_singular(alpha: int, n: int) -> float:
    s = svd_small(DifferenceOperator(alpha, n).matrix)
    return float(s[n - alpha - 1])


def conditioning_norm(alpha: int, n: int, rtol: float = 1e-9) -> float:
    """||pinv(nabla)||, via the SVD and via the Toeplitz block; both must agree."""
    if n - alpha < 1:
        raise ValueError("need n - alpha >= 1")
    via_svd = 1.0 / smallest_nonzero_singular(alpha, n)
    symbol = symbol_abs_power(alpha)
    if n - alpha > symbol.r:
        lam = toeplitz_min_eig(symbol, n - alpha)
    else:
        # block narrower than the band: banded LDL does not apply
        lam = toeplitz_min_eig_dense(symbol, n - alpha)
    via_toeplitz = 1.0 / math.sqrt(lam)
    if abs(via_svd - via_toeplitz) > rtol * via_toeplitz:
        raise StructureViolationError(
            f"SVD gives {via_svd!r}, Toeplitz block gives {via_toeplitz!r}")
    return via_toeplitz


def verify_block_structure(alpha: int, n: int):
    """Spectrum of nabla nabla^T versus {0}*alpha + spectrum of T_{n-a}(|1-t|^(2a)).

    Returns (passed, max_mismatch).
    """
    if n > 256:
        raise ValueError("n must be at most 256")
    nab = DifferenceOperator(alpha, n).matrix
    gram_eigs = sym_eigen(nab @ nab.T)[0]
    block = toeplitz_dense(symbol_abs_power(alpha), n - alpha)
    expected = np.sort(np.concatenate([np.zeros(alpha), sym_eigen(block)[0]]))
    mismatch = float(np.abs(np.sort(gram_eigs) - expected).max())
    return mismatch <= 1e-9 * np.linalg.norm(block), mismatch


def minimal_singular_vector(alpha: int, n: int) -> np.ndarray:
    """Unit vector orthogonal to the kernel where E/D attains its maximum."""
    _, s, vh = svd_small_vectors(DifferenceOperator(alpha, n).matrix)
    return vh[n - alpha - 1]


def conditioning_ratio_empirical(alpha: int, n: int, trials: int = 50, seed: int = 0) -> float:
    """max E/D over seeded Gaussian samples plus the extremal singular vector."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    best = 0.0
    samples = [rng.standard_normal(n) for _ in range(trials)]
    samples.append(minimal_singular_vector(alpha, n))
    for y in samples:
        d = residual_d(alpha, y)
        if d == 0:
            continue
        best = max(best, best_fit_e(alpha, y) / d)
    return best


def c_alpha_by_lsq(alpha: int, n_grid=None) -> ConstantEstimate:
    """(n^a / ||pinv(nabla)||)^2 on a grid of n, extrapolated in 1/n."""
    from calpha.toeplitz import richardson_table

    if n_grid is None:
        n_grid = {1: (64, 128, 256, 512), 2: (32, 64, 128, 256),
                  3: (16, 32, 64), 4: (16, 32, 64)}.get(alpha)
        if n_grid is None:
            raise ValueError("the least-squares route supports alpha in 1..4")
    ns, vals = [], []
    for n in sorted(n_grid):
        norm = 1.0 / math.sqrt(toeplitz_min_eig(symbol_abs_power(alpha), n - alpha))
        if n <= 512:
            # cross-check against the explicit SVD where affordable
            conditioning_norm(alpha, n, rtol=1e-6)
        ns.append(n)
        vals.append((n ** alpha / norm) ** 2)
    table = richardson_table(ns, vals)
    value = table[-1][-1]
    err = abs(value - table[-2][-1]) / abs(value)
    return ConstantEstimate(alpha, LogScalar.from_float(value), Method.LSQ,
                            {"n_grid": ns, "scaled": vals}, err)
