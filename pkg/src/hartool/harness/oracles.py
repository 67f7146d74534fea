"""Brute-force oracle suites.

Each oracle checks an implementation route against an independent one:
closed forms for power gauges, exhaustive enumeration over subsets,
candidate centers, or cubes, and analytic integrals.  They back the
acceptance tests and are runnable from the CLI (`hartool oracle <name>`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..gauges import (BorderlineLogModulus, HolderModulus, LogModulus, PowerGauge,
                      ScaledPowerGauge, dini_integral, luxemburg_mean_norm,
                      luxemburg_raw_norm)
from ..geometry import Cube, CubeFamily, Grid, SampledFunction, enumerate_cubes
from ..maximal import local_sharp_maximal, sharp_median, _window_count
from ..spaces import morrey_norm
from ..weights import subset_ratio_exact

__all__ = ["OracleCase", "run_oracle", "ORACLE_NAMES", "brute_force_sharp",
           "exhaustive_subset_ratio"]


@dataclass(frozen=True)
class OracleCase:
    name: str
    passed: bool
    detail: str


def _rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


# ---------------------------------------------------------------------------
# independent references

def brute_force_sharp(values: np.ndarray, s: float) -> float:
    """inf_c of the level-(1-s) median of |values - c| over candidate centers.

    The objective is piecewise linear in c with vertices at pairwise
    midpoints, so scanning midpoints and the values themselves is exact."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    n = v.size
    kp = _window_count(s, n)
    cands = np.concatenate([v, (v[:, None] + v[None, :]).ravel() / 2.0])
    best = math.inf
    for c in cands:
        d = np.sort(np.abs(v - c))
        best = min(best, d[kp - 1])
    return float(best)


def exhaustive_subset_ratio(wv: np.ndarray, vv: np.ndarray, k: int) -> float:
    """max over |E| = k of w(E)/v(Q minus E) by full enumeration."""
    vtot = vv.sum()
    best = 0.0
    for comb in combinations(range(wv.size), k):
        idx = list(comb)
        den = vtot - vv[idx].sum()
        num = wv[idx].sum()
        if den <= 0:
            if num > 0:
                return math.inf
            continue
        best = max(best, num / den)
    return float(best)


# ---------------------------------------------------------------------------
# oracle suites

def _oracle_luxemburg(seed: int) -> list[OracleCase]:
    rng = np.random.default_rng(seed)
    cases = []
    worst = 0.0
    for trial in range(100):
        n = int(rng.choice([16, 32, 64, 128]))
        grid = Grid(1, n, float(rng.uniform(0.5, 2.0)))
        f = SampledFunction(grid, rng.uniform(0, 3, size=n) * rng.choice([1.0, -1.0], size=n))
        m = int(rng.integers(1, n + 1))
        corner = int(rng.integers(0, n - m + 1))
        Q = Cube(grid, (corner,), m)
        p = float(rng.choice([1.5, 2.0, 3.0]))
        gauge = PowerGauge(p)
        sub = np.abs(f.values[Q.slices])
        mean_ref = float(np.mean(sub**p) ** (1.0 / p))
        raw_ref = float((np.sum(sub**p) * grid.h) ** (1.0 / p))
        worst = max(worst,
                    _rel_err(luxemburg_mean_norm(f, Q, gauge), mean_ref),
                    _rel_err(luxemburg_raw_norm(f, Q, gauge), raw_ref))
    cases.append(OracleCase("luxemburg/power-closed-forms", worst <= 1e-9,
                            f"max relative error {worst:.3e} over 100 trials"))
    return cases


def _oracle_sharp_median(seed: int) -> list[OracleCase]:
    rng = np.random.default_rng(seed)
    exact = True
    detail = ""
    for trial in range(200):
        n = int(rng.integers(2, 65))
        # dyadic lattice keeps midpoint arithmetic exact in floats
        vals = rng.integers(-5 * 2**20, 5 * 2**20, size=n) * 2.0**-20
        s = float(rng.choice([0.5, 0.4, 0.25]))
        grid = Grid(1, 64)
        padded = np.zeros(64)
        padded[:n] = vals
        f = SampledFunction(grid, padded)
        got = sharp_median(f, s, Cube(grid, (0,), n))
        ref = brute_force_sharp(vals, s)
        if got != ref:
            exact = False
            detail = f"trial {trial}: window {got!r} vs brute {ref!r}"
            break
    return [OracleCase("sharp-median/brute-force-centers", exact,
                       detail or "exact equality on 200 random value sets")]


def _oracle_condition_f(seed: int) -> list[OracleCase]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(50):
        ncells = int(rng.integers(2, 17))
        wv = rng.uniform(0, 2, size=ncells)
        vv = rng.uniform(0.05, 2, size=ncells)
        k = int(rng.integers(1, max(2, ncells // 2 + 1)))
        lam, _ = subset_ratio_exact(wv, vv, k)
        ref = exhaustive_subset_ratio(wv, vv, k)
        worst = max(worst, _rel_err(lam, ref))
    return [OracleCase("condition-f/exhaustive-subsets", worst <= 1e-9,
                       f"max relative error {worst:.3e} over 50 trials")]


def _oracle_local_sharp(seed: int) -> list[OracleCase]:
    rng = np.random.default_rng(seed)
    n = 32
    grid = Grid(1, n)
    f = SampledFunction(grid, rng.integers(-2 * 2**20, 2 * 2**20, size=n) * 2.0**-20)
    family = CubeFamily(grid, "all")
    q0 = Cube(grid, (0,), n)
    engine = local_sharp_maximal(f, 0.5, q0, family).values
    ok = True
    detail = f"exhaustive agreement at N={n}"
    for x in range(n):
        best = 0.0
        for Q in family.iter_cubes(containing=(x,)):
            best = max(best, brute_force_sharp(f.values[Q.slices], 0.5))
        if engine[x] != best:
            ok = False
            detail = f"mismatch at cell {x}: engine {engine[x]!r} vs brute {best!r}"
            break
    return [OracleCase("local-sharp/exhaustive-cubes", ok, detail)]


def _oracle_conjugate(seed: int) -> list[OracleCase]:
    cases = []
    for p in (1.5, 2.0, 3.0):
        gauge = ScaledPowerGauge(p, 1.0 / p)  # A = t^p / p is self-dual family
        pprime = p / (p - 1.0)
        worst = 0.0
        for s in (0.25, 1.0, 2.0, 7.5):
            ref = s**pprime / pprime
            worst = max(worst, _rel_err(gauge.conjugate_value(s), ref))
        cases.append(OracleCase(f"conjugate/power-p{p}", worst <= 1e-6,
                                f"max relative error {worst:.3e}"))
    return cases


def _oracle_dini(seed: int) -> list[OracleCase]:
    cases = []
    val, div = dini_integral(HolderModulus(1.0), 1.0)
    cases.append(OracleCase("dini/holder-1", (not div) and _rel_err(val, 1.0) <= 1e-6,
                            f"value {val:.8f}, divergent={div}"))
    val, div = dini_integral(HolderModulus(0.5), 2.0)
    cases.append(OracleCase("dini/holder-0.5", (not div) and _rel_err(val, 2 * math.sqrt(2)) <= 1e-5,
                            f"value {val:.8f}, divergent={div}"))
    _, div = dini_integral(BorderlineLogModulus(), 1.0)
    cases.append(OracleCase("dini/log-borderline", div, f"divergent={div}"))
    _, div = dini_integral(LogModulus(1.0), 1.0)
    cases.append(OracleCase("dini/log-eps1-convergent", not div, f"divergent={div}"))
    return cases


def _oracle_morrey(seed: int) -> list[OracleCase]:
    rng = np.random.default_rng(seed)
    n = 64
    grid = Grid(1, n)
    family = CubeFamily(grid, "all")
    worst = 0.0
    for _ in range(5):
        f = SampledFunction(grid, rng.uniform(-2, 2, size=n))
        p, lam = 2.0, 0.5
        sigma = (lam - grid.dim) / p
        from ..gauges import PowerLawWeight
        phi = PowerLawWeight(sigma)
        got = morrey_norm(f, PowerGauge(p), phi, family)
        ref = 0.0
        for Q in enumerate_cubes(family):
            l = Q.side_length
            ref = max(ref, l ** (-lam / p) * float(np.sum(np.abs(f.values[Q.slices]) ** p) * grid.h) ** (1 / p))
        worst = max(worst, _rel_err(got, ref))
    return [OracleCase("morrey/classical-reduction", worst <= 1e-9,
                       f"max relative error {worst:.3e} over 5 functions")]


def _oracle_cubes(seed: int) -> list[OracleCase]:
    grid = Grid(1, 4)
    all4 = enumerate_cubes(CubeFamily(grid, "all"))
    dy = enumerate_cubes(CubeFamily(grid, "dyadic"))
    at0 = enumerate_cubes(CubeFamily(grid, "all"), containing=(0,))
    ok = len(all4) == 10 and len(dy) == 7 and len(at0) == 4
    return [OracleCase("cubes/enumeration-counts", ok,
                       f"counts all={len(all4)} dyadic={len(dy)} at0={len(at0)}")]


ORACLE_NAMES = {
    "luxemburg": _oracle_luxemburg,
    "sharp_median": _oracle_sharp_median,
    "condition_f": _oracle_condition_f,
    "local_sharp": _oracle_local_sharp,
    "conjugate": _oracle_conjugate,
    "dini": _oracle_dini,
    "morrey": _oracle_morrey,
    "cubes": _oracle_cubes,
}


def run_oracle(name: str, seed: int = 0) -> list[OracleCase]:
    if name == "all":
        out = []
        for key in ORACLE_NAMES:
            out.extend(ORACLE_NAMES[key](seed))
        return out
    if name not in ORACLE_NAMES:
        raise ValueError(f"unknown oracle {name!r}; known: {sorted(ORACLE_NAMES)} or 'all'")
    return ORACLE_NAMES[name](seed)
