"""Invariant batches run by ``calpha verify``.

Each suite returns a list of :class:`Check` rows; a suite passes when every
row does.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from calpha import green, lsq, toeplitz, wirtinger
from calpha.numcore import svd_small


class Check(NamedTuple):
    name: str
    passed: bool
    observed: str


def _rel(a, b):
    return abs(a - b) / abs(b)


def suite_bounds(alpha_max: int = 8, **_):
    rows = []
    for a in range(1, alpha_max + 1):
        c = green.c_alpha_by_nystrom(a, 200)
        lo, hi = wirtinger.bound_lower(a), wirtinger.bound_upper(a)
        rows.append(Check(f"sandwich alpha={a}", lo < c.value < hi,
                          f"{lo.to_float():.6g} < {c.c:.10g} < {hi.to_float():.6g}"))
        rq = wirtinger.rayleigh_quotient(a, wirtinger.TestFunction())
        err = _rel(rq, hi.to_float())
        rows.append(Check(f"rayleigh(p=1) = upper bound alpha={a}", err <= 1e-10, f"rel {err:.2e}"))
        ratio = c.c / wirtinger.asymptotic_c(a).to_float()
        rows.append(Check(f"c/asymptotic in (0.85, 1) alpha={a}", 0.85 < ratio < 1.0, f"{ratio:.6f}"))
    return rows


def suite_circulant(alpha_max: int = 3, **_):
    rows = []
    for a in range(1, min(alpha_max, 3) + 1):
        worst = 0.0
        for n in range(2 * a + 1, 17):
            explicit = svd_small(toeplitz.circulant_dense(toeplitz.symbol_diff_power(a), n))
            law = np.sort(toeplitz.circulant_singular_values(a, n))[::-1]
            worst = max(worst, float(np.abs(explicit - law).max()))
        rows.append(Check(f"circulant svd alpha={a}, n<=16", worst <= 1e-10, f"max diff {worst:.2e}"))
        worst = 0.0
        for n in (2 * a + 1, 64, 1000, 4096):
            s = toeplitz.circulant_singular_values(a, n)
            smallest = float(np.min(s[s > 0]))
            worst = max(worst, _rel(smallest, toeplitz.smallest_nonzero_circulant_sv(a, n)))
        rows.append(Check(f"smallest nonzero = (4 sin^2(pi/n))^(a/2) alpha={a}",
                          worst <= 1e-14, f"rel {worst:.2e}"))
    return rows


def suite_gram(alpha_max: int = 4, **_):
    rows = []
    for a in range(1, min(alpha_max, 4) + 1):
        b12, c12, off12 = toeplitz.gram_defect(a, 12)
        b24, c24, off24 = toeplitz.gram_defect(a, 24)
        fro = np.linalg.norm(toeplitz.toeplitz_dense(toeplitz.symbol_abs_power(a), 24))
        rows.append(Check(f"defect confined to {c24} block alpha={a}",
                          off12 <= 1e-12 * fro and off24 <= 1e-12 * fro and c12 == c24,
                          f"off-block {max(off12, off24):.1e}"))
        diff = float(np.abs(b12 - b24).max())
        rows.append(Check(f"block independent of n alpha={a}", diff <= 1e-13, f"{diff:.1e}"))
    return rows


def suite_lsq(alpha_max: int = 3, **_):
    rows = []
    for a in range(1, min(alpha_max, 3) + 1):
        for n in (10, 30, 100):
            try:
                v = lsq.conditioning_norm(a, n)
                rows.append(Check(f"two-path conditioning alpha={a} n={n}", True, f"{v:.10g}"))
            except lsq.StructureViolationError as exc:
                rows.append(Check(f"two-path conditioning alpha={a} n={n}", False, str(exc)))
        ok, mis = lsq.verify_block_structure(a, 64)
        rows.append(Check(f"block structure alpha={a} n=64", bool(ok), f"mismatch {mis:.1e}"))
    r = lsq.conditioning_ratio_empirical(1, 100, 50) * math.pi / 100
    rows.append(Check("max E/D * pi/n, alpha=1 n=100", 0.95 < r < 1.05, f"{r:.6f}"))
    return rows


def suite_green(alpha_max: int = 6, **_):
    rows = []
    grid = np.linspace(0, 1, 41)
    for a in range(1, min(alpha_max, 6) + 1):
        g = green.green_matrix(a, grid)
        scale = max(1.0, float(np.abs(g).max()))
        sym = float(np.abs(g - g.T).max())
        point = float(np.abs(g - g[::-1, ::-1]).max())
        bnd = float(max(np.abs(g[0]).max(), np.abs(g[-1]).max()))
        rows.append(Check(f"kernel symmetries alpha={a}",
                          max(sym, point, bnd) <= 1e-11 * scale and g.min() >= -1e-11 * scale,
                          f"sym {sym:.1e} point {point:.1e} boundary {bnd:.1e} min {g.min():.1e}"))
    c = green.c_alpha_by_nystrom(1, 50).c
    rows.append(Check("nystrom alpha=1 m=50 within 1e-6 of pi^2", _rel(c, math.pi ** 2) <= 1e-6,
                      f"{c!r}"))
    return rows


def suite_wirtinger(alpha_max: int = 3, trials: int = 1000, seed: int = 0, **_):
    rows = []
    rng = np.random.default_rng(seed)
    for a in range(1, min(alpha_max, 3) + 1):
        for n in (8, 16, 33):
            bad = 0
            for _ in range(trials):
                u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                bad += not wirtinger.discrete_wirtinger_check(a, n, u)[2]
            rows.append(Check(f"discrete inequality alpha={a} n={n}", bad == 0,
                              f"{bad} violations in {trials}"))
    refs = {1: math.pi ** 2}
    for a in range(1, min(alpha_max, 3) + 1):
        c_ref = refs.get(a) or green.c_alpha_by_nystrom(a, 200).c
        bad = 0
        for _ in range(100):
            p = tuple(float(x) for x in rng.standard_normal(6))
            bad += not wirtinger.continuous_wirtinger_check(a, wirtinger.TestFunction(p), c_ref)[1]
        rows.append(Check(f"clamped inequality alpha={a}", bad == 0, f"{bad} violations in 100"))
    lhs, rhs, _ = wirtinger.periodic_wirtinger_check(2, {1: 1.0})
    rows.append(Check("periodic equality for the k=1 mode", math.isclose(lhs, rhs, rel_tol=1e-14),
                      f"{lhs:.6g} vs {rhs:.6g}"))
    lhs, rhs, ok = wirtinger.periodic_wirtinger_check(1, {2: 1.0})
    rows.append(Check("periodic strict for the k=2 mode", ok and lhs > rhs, f"{lhs:.6g} > {rhs:.6g}"))
    return rows


SUITES = {
    "bounds": suite_bounds,
    "circulant": suite_circulant,
    "gram": suite_gram,
    "lsq": suite_lsq,
    "green": suite_green,
    "wirtinger": suite_wirtinger,
}


def run_suite(name: str, **kwargs):
    if name == "all":
        rows = []
        for key in SUITES:
            rows.extend(SUITES[key](**kwargs))
        return rows
    return SUITES[name](**kwargs)
