"""Medians, sharp medians, local sharp maximal functions, and gauge-bump
fractional maximal functions.

The (maximal) median of f over a cube at level t is the largest M whose
strict sublevel set {f < M} fills at most a t-fraction of the cube; on cell
values this is an order statistic.  The sharp median at level 1-s is the
best-constant median oscillation inf_c median(|f - c|), which on sorted
values reduces exactly to half the narrowest window spanning the required
number of points.  Local sharp maximal functions take suprema of sharp
medians over admissible cubes inside a base cube, and the fractional
maximal function takes suprema of |Q|^gamma times mean-normalized
Luxemburg norms over cubes containing the point.
"""

from __future__ import annotations

import math

import numpy as np

from ._sweeps import corner_to_point_max, dyadic_offsets, window_matrix, window_min, window_sums
from .gauges import YoungFunction, batched_mean_norms
from .geometry import Cube, CubeFamily, SampledFunction, dilate, integrate, unclipped_dilate_measure
from .operators import LambdaSequence

__all__ = [
    "median",
    "sharp_median",
    "sharp_median_plugin",
    "sharp_of_sorted",
    "local_sharp_maximal",
    "fractional_maximal",
    "sup_inf_over_cubes",
    "lemma41_rhs",
]

_SNAP = 1e-9  # guards order-statistic indices against float noise in t*n


def _median_index(t: float, n: int) -> int:
    """0-based index of the level-t maximal median among n sorted values."""
    k = int(math.floor(t * n + _SNAP))
    return min(k, n - 1)


def _window_count(s: float, n: int) -> int:
    """Points a window must span: smallest k with #{|f-c| > alpha} < s n."""
    k = n - int(math.ceil(s * n - _SNAP)) + 1
    return max(1, min(k, n))


def median(f: SampledFunction, t: float, Q: Cube) -> float:
    """Largest M with #{cells of Q with f < M} <= t * ncells."""
    if not 0 < t < 1:
        raise ValueError("median level t must lie in (0, 1)")
    vals = np.sort(f.values[Q.slices], axis=None)
    return float(vals[_median_index(t, vals.size)])


def sharp_of_sorted(vals: np.ndarray, s: float) -> float:
    """Sharp median from sorted values: half the narrowest spanning window."""
    n = vals.size
    kp = _window_count(s, n)
    if kp <= 1:
        return 0.0
    widths = vals[kp - 1:] - vals[: n - kp + 1]
    return 0.5 * float(widths.min())


def sharp_median(f: SampledFunction, s: float, Q: Cube) -> float:
    """inf_c median(|f - c|) at level 1-s over Q, computed exactly."""
    if not 0 < s <= 0.5:
        raise ValueError("sharp-median level s must lie in (0, 1/2]")
    vals = np.sort(f.values[Q.slices], axis=None)
    return sharp_of_sorted(vals, s)


def sharp_median_plugin(f: SampledFunction, s: float, Q: Cube) -> float:
    """Plug-in variant: the level-(1-s) median of |f - m| with m the
    level-(1-s) median of f itself.

    Dominates the exact inf-over-centers value; both are reported so the
    equivalence constant between them can be observed empirically."""
    if not 0 < s <= 0.5:
        raise ValueError("sharp-median level s must lie in (0, 1/2]")
    m = median(f, 1.0 - s, Q)
    vals = np.sort(np.abs(f.values[Q.slices] - m), axis=None)
    return float(vals[_median_index(1.0 - s, vals.size)])


def _masked_zero(shape) -> np.ndarray:
    return np.full(shape, -np.inf)


def local_sharp_maximal(f: SampledFunction, s: float, Q0: Cube,
                        family: CubeFamily) -> SampledFunction:
    """Sup of sharp medians over family cubes Q with x in Q inside Q0.

    Cells outside Q0 are marked absent (NaN)."""
    if not 0 < s <= 0.5:
        raise ValueError("sharp-median level s must lie in (0, 1/2]")
    grid = f.grid
    sub = f.values[Q0.slices]
    n0 = Q0.side_cells
    best = _masked_zero(sub.shape)
    if family.kind == "all":
        for m in family.sizes(cap=n0):
            wins = np.sort(window_matrix(sub, m), axis=1)
            kp = _window_count(s, wins.shape[1])
            if kp <= 1:
                stat = np.zeros(wins.shape[0])
            else:
                stat = 0.5 * (wins[:, kp - 1:] - wins[:, : wins.shape[1] - kp + 1]).min(axis=1)
            kshape = tuple(n0 - m + 1 for _ in range(grid.dim))
            best = np.maximum(best, corner_to_point_max(stat.reshape(kshape), m, n0))
    else:
        for m in family.sizes(cap=n0):
            offs = [dyadic_offsets(c, n0, m) for c in Q0.corner]
            if any(len(o) == 0 for o in offs):
                continue
            if grid.dim == 1:
                for o in offs[0]:
                    vals = np.sort(sub[o:o + m], axis=None)
                    best[o:o + m] = np.maximum(best[o:o + m], sharp_of_sorted(vals, s))
            else:
                for o1 in offs[0]:
                    for o2 in offs[1]:
                        vals = np.sort(sub[o1:o1 + m, o2:o2 + m], axis=None)
                        v = sharp_of_sorted(vals, s)
                        blk = best[o1:o1 + m, o2:o2 + m]
                        np.maximum(blk, v, out=blk)
    out = np.full(grid.shape, np.nan)
    out[Q0.slices] = np.where(np.isneginf(best), np.nan, best)  # empty family
    return SampledFunction(grid, out, name=f"sharp[{f.name}]", masked=True)


def _power_mean_norms(sums_pow: np.ndarray, ncells: int, p: float, scale: float) -> np.ndarray:
    # closed form for A(t) = scale * t^p: norm = (scale * mean |f|^p)^(1/p);
    # prefix-sum cancellation can leave tiny negatives where the sum is zero
    return (scale * np.maximum(sums_pow, 0.0) / ncells) ** (1.0 / p)


def fractional_maximal(f: SampledFunction, gamma: float, A: YoungFunction,
                       family: CubeFamily) -> SampledFunction:
    """M f(x) = sup over family cubes Q containing x of |Q|^gamma ||f||_Q.

    ||.||_Q is the mean-normalized Luxemburg norm; pure-power gauges use the
    exact closed form, other gauges a batched bisection per cube size."""
    if not 0 <= gamma < 1:
        raise ValueError("gamma must lie in [0, 1)")
    grid = f.grid
    n = grid.cells_per_side
    absvals = np.abs(f.values)
    power = A.power_form()
    if power is not None:
        pw = absvals ** power[0]
    best = np.zeros(grid.shape)  # cube stats are nonnegative
    for m in family.sizes():
        meas = (m * grid.h) ** grid.dim
        ncells = m**grid.dim
        if family.kind == "all":
            if power is not None:
                norms = _power_mean_norms(window_sums(pw, m).ravel(), ncells, power[0], power[1])
            else:
                norms = batched_mean_norms(window_matrix(absvals, m), A)
            stat = meas**gamma * norms
            kshape = tuple(n - m + 1 for _ in range(grid.dim))
            best = np.maximum(best, corner_to_point_max(stat.reshape(kshape), m, n))
        else:
            if grid.dim == 1:
                if power is not None:
                    norms = _power_mean_norms(pw.reshape(n // m, m).sum(axis=1),
                                              ncells, power[0], power[1])
                else:
                    norms = batched_mean_norms(absvals.reshape(n // m, m), A)
                stat = np.repeat(meas**gamma * norms, m)
            else:
                if power is not None:
                    bsums = pw.reshape(n // m, m, n // m, m).sum(axis=(1, 3))
                    norms = _power_mean_norms(bsums.ravel(), ncells, power[0], power[1])
                else:
                    blocks = absvals.reshape(n // m, m, n // m, m).transpose(0, 2, 1, 3).reshape(-1, m * m)
                    norms = batched_mean_norms(blocks, A)
                stat = np.repeat(np.repeat((meas**gamma * norms).reshape(n // m, n // m), m, axis=0),
                                 m, axis=1)
            best = np.maximum(best, stat.reshape(grid.shape))
    return SampledFunction(grid, best, name=f"M[{f.name}]")


def sup_inf_over_cubes(g: SampledFunction, family: CubeFamily,
                       Q0: Cube | None = None) -> SampledFunction:
    """sup over family cubes Q (x in Q, Q inside Q0) of inf over Q of g.

    Realizes the localized right-hand sides of the pointwise bounds; with
    no Q0 the sup runs over all family cubes of the grid."""
    grid = g.grid
    if Q0 is None:
        Q0 = Cube(grid, (0,) * grid.dim, grid.cells_per_side)
    sub = g.values[Q0.slices]
    n0 = Q0.side_cells
    best = _masked_zero(sub.shape)
    for m in family.sizes(cap=n0):
        if family.kind == "all":
            mins = window_min(sub, m)
            best = np.maximum(best, corner_to_point_max(mins, m, n0))
        else:
            offs = [dyadic_offsets(c, n0, m) for c in Q0.corner]
            if any(len(o) == 0 for o in offs):
                continue
            if grid.dim == 1:
                for o in offs[0]:
                    v = sub[o:o + m].min()
                    best[o:o + m] = np.maximum(best[o:o + m], v)
            else:
                for o1 in offs[0]:
                    for o2 in offs[1]:
                        v = sub[o1:o1 + m, o2:o2 + m].min()
                        blk = best[o1:o1 + m, o2:o2 + m]
                        np.maximum(blk, v, out=blk)
    out = np.full(grid.shape, np.nan)
    out[Q0.slices] = np.where(np.isneginf(best), np.nan, best)  # empty family
    return SampledFunction(grid, out, name=f"supinf[{g.name}]", masked=True)


def lemma41_rhs(f: SampledFunction, Q: Cube, lam: LambdaSequence,
                gamma: float, r: float) -> float:
    """sum_m lambda_m |2^m Q|^gamma ( |2^m Q|^-1 int_{2^m Q : grid} |f|^r )^(1/r).

    Normalizing measures are unclipped, integrals run over the clipped
    dilates."""
    if r < 1:
        raise ValueError("r must be >= 1")
    absr = SampledFunction(f.grid, np.abs(f.values) ** r)
    total = 0.0
    for m, lam_m in enumerate(lam.values, start=1):
        if lam_m == 0.0:
            continue
        box = dilate(Q, m)
        if box.is_empty:
            continue
        U = unclipped_dilate_measure(Q, m)
        I = integrate(absr, box)
        total += lam_m * U**gamma * (I / U) ** (1.0 / r)
    return total
