"""Generalized Orlicz-Morrey norms and Campanato seminorms.

For a gauge Phi and a positive weight phi(x, t) that decreases in t, the
Morrey norm is the sup over cubes Q = Q(x, l) (center x, side l) of

    (1 / phi(x, l)) Phi^{-1}(1/|Q|) ||f||_{Phi, Q}

with the raw (integral-normalized) Luxemburg norm.  The Campanato
seminorm replaces ||f||_{Phi, Q} by inf_c ||f - c||_{Phi, Q}; the map
c -> norm is convex, so the infimum is found by ternary search with a
brute-force scan as a test oracle.  The module also provides the
localization gap record behind the Morrey-boundedness of the fractional
maximal operator, and the two weight-compatibility checks used to
pre-qualify (phi, psi) pairs.

All sups over the auxiliary scale t are truncated at twice the domain
side; the truncation radius is part of the harness report metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._sweeps import window_matrix, window_sums
from .gauges import LinearGauge, MorreyWeight, YoungFunction
from .geometry import Cube, CubeFamily, Grid, SampledFunction, concentric_box, dilate, integrate
from .maximal import fractional_maximal

__all__ = [
    "morrey_norm",
    "campanato_seminorm",
    "Prop51Record",
    "prop51_gap",
    "compat_52",
    "compat_53",
]

_SNAP = 1e-9
TRUNCATION_FACTOR = 2.0  # sup over t runs up to this multiple of the domain side


def _raw_norms_by_size(vals: np.ndarray, A: YoungFunction, family: CubeFamily):
    """Yield (m, corner-flattened raw Luxemburg norms) over the family.

    Raw norms divide nothing by |Q|; for a pure power gauge the closed form
    (scale * int |f|^p)^(1/p) applies and is used directly."""
    grid = family.grid
    n = grid.cells_per_side
    dim = grid.dim
    cellm = grid.h**dim
    power = A.power_form()
    pw = vals ** power[0] if power is not None else None
    for m in family.sizes():
        ncells = m**dim
        if family.kind == "all":
            if power is not None:
                sums = np.maximum(window_sums(pw, m).ravel(), 0.0)  # cancellation guard
                norms = (power[1] * sums * cellm) ** (1.0 / power[0])
            else:
                norms = _batched_raw(window_matrix(vals, m), A, cellm)
        else:
            if dim == 1:
                rows = (pw if power is not None else vals).reshape(n // m, m)
            else:
                rows = (pw if power is not None else vals).reshape(n // m, m, n // m, m) \
                    .transpose(0, 2, 1, 3).reshape(-1, ncells)
            if power is not None:
                norms = (power[1] * np.maximum(rows.sum(axis=1), 0.0) * cellm) ** (1.0 / power[0])
            else:
                norms = _batched_raw(rows, A, cellm)
        yield m, norms


def _batched_raw(rows: np.ndarray, A: YoungFunction, cellm: float) -> np.ndarray:
    """Raw Luxemburg norms per row: smallest lam with cellm * sum A(|v|/lam) <= 1."""
    w = np.abs(rows)
    vmax = w.max(axis=1)
    live = vmax > 0
    out = np.zeros(w.shape[0])
    if not live.any():
        return out
    wl = w[live]
    hi = vmax[live].copy()
    cond = lambda lam: np.sum(A.value(wl / lam[:, None]), axis=1) * cellm
    for _ in range(200):
        bad = cond(hi) > 1.0
        if not bad.any():
            break
        hi[bad] *= 2.0
    lo = hi.copy()
    for _ in range(200):
        cand = lo / 2.0
        done = cond(cand) > 1.0
        lo = np.where(done, lo, cand)
        if done.all():
            break
    lo = lo / 2.0
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        good = cond(mid) <= 1.0
        hi = np.where(good, mid, hi)
        lo = np.where(good, lo, mid)
    out[live] = hi
    return out


def _phi_inverse_of_inverse_measure(Phi: YoungFunction, meas: float) -> float:
    power = Phi.power_form()
    if power is not None:
        return (1.0 / (meas * power[1])) ** (1.0 / power[0])
    return Phi.inverse(1.0 / meas)


def morrey_norm(f: SampledFunction, Phi: YoungFunction, phi: MorreyWeight,
                family: CubeFamily) -> float:
    """sup over family cubes of (1/phi(x, l)) Phi^{-1}(1/|Q|) ||f||_{Phi,Q}."""
    grid = f.grid
    vals = np.abs(f.values)
    best = 0.0
    for m, norms in _raw_norms_by_size(vals, Phi, family):
        l = m * grid.h
        meas = l**grid.dim
        factor = _phi_inverse_of_inverse_measure(Phi, meas) / float(phi.value(None, l))
        best = max(best, factor * float(norms.max(initial=0.0)))
    return best


def _windows_by_size(vals: np.ndarray, family: CubeFamily):
    grid = family.grid
    n = grid.cells_per_side
    for m in family.sizes():
        if family.kind == "all":
            yield m, window_matrix(vals, m)
        else:
            if grid.dim == 1:
                yield m, vals.reshape(n // m, m)
            else:
                yield m, vals.reshape(n // m, m, n // m, m).transpose(0, 2, 1, 3).reshape(-1, m * m)


def _raw_norm_rows(rows: np.ndarray, A: YoungFunction, cellm: float) -> np.ndarray:
    power = A.power_form()
    if power is not None:
        sums = (np.abs(rows) ** power[0]).sum(axis=1)
        return (power[1] * sums * cellm) ** (1.0 / power[0])
    return _batched_raw(rows, A, cellm)


def campanato_seminorm(f: SampledFunction, Phi: YoungFunction, phi: MorreyWeight,
                       family: CubeFamily, ternary_iters: int = 90) -> float:
    """Morrey-type sup with the per-cube best constant removed.

    The per-cube map c -> ||f - c||_{Phi,Q} is convex and is minimized by
    ternary search on [min_Q f, max_Q f]; constants are annihilated and the
    seminorm is shift invariant."""
    grid = f.grid
    cellm = grid.h**grid.dim
    best = 0.0
    for m, rows in _windows_by_size(f.values, family):
        l = m * grid.h
        meas = l**grid.dim
        lo = rows.min(axis=1)
        hi = rows.max(axis=1)
        for _ in range(ternary_iters):
            c1 = lo + (hi - lo) / 3.0
            c2 = hi - (hi - lo) / 3.0
            n1 = _raw_norm_rows(rows - c1[:, None], Phi, cellm)
            n2 = _raw_norm_rows(rows - c2[:, None], Phi, cellm)
            take = n1 < n2
            hi = np.where(take, c2, hi)
            lo = np.where(take, lo, c1)
        norms = _raw_norm_rows(rows - (0.5 * (lo + hi))[:, None], Phi, cellm)
        factor = _phi_inverse_of_inverse_measure(Phi, meas) / float(phi.value(None, l))
        best = max(best, factor * float(norms.max(initial=0.0)))
    return best


@dataclass(frozen=True)
class Prop51Record:
    """Both sides of the localization bound for the fractional maximal
    operator on one cube, for the harness to ratio."""

    lhs: float
    rhs_i: float
    rhs_ii: float
    t_range_empty: bool
    truncation: float

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs_i": self.rhs_i,
            "rhs_ii": self.rhs_ii,
            "t_range_empty": self.t_range_empty,
            "truncation": self.truncation,
        }


def _power_exponents(Phi: YoungFunction, Psi: YoungFunction, gamma: float):
    pf, qf = Phi.power_form(), Psi.power_form()
    if pf is None or qf is None:
        raise ValueError("localization gap is implemented for power gauges")
    p, q = pf[0], qf[0]
    if abs(1.0 / q - (1.0 / p - gamma)) > 1e-9:
        raise ValueError("gauges must satisfy the matched-exponent relation 1/q = 1/p - gamma")
    return p, q


def prop51_gap(f: SampledFunction, Phi: YoungFunction, Psi: YoungFunction,
               gamma: float, Q: Cube, cn_dn: float,
               maximal_family: CubeFamily | None = None) -> Prop51Record:
    """Record ||M f||_{Psi,Q} against the two localized majorants.

    The sup over scales t > cn_dn * l runs over concentric boxes centered at
    Q's center with sides in whole cells, clipped to the grid, up to the
    truncation radius; normalizing measures stay unclipped."""
    _power_exponents(Phi, Psi, gamma)
    grid = f.grid
    if maximal_family is None:
        maximal_family = CubeFamily(grid, "all")
    mf = fractional_maximal(f, gamma, LinearGauge(1.0), maximal_family)
    from .gauges import luxemburg_raw_norm

    lhs = luxemburg_raw_norm(mf, Q, Psi)
    l = Q.side_length
    h = grid.h
    t_cap = int(round(TRUNCATION_FACTOR * grid.side_length / h))
    j_lo_excl = int(math.floor(cn_dn * Q.side_cells + _SNAP)) + 1  # t strictly above
    j_lo_incl = int(math.ceil(cn_dn * Q.side_cells - _SNAP))
    psi_inv_q = _phi_inverse_of_inverse_measure(Psi, Q.measure)
    absf = abs(f)
    two_q = dilate(Q, 1)
    rhs_i_head = luxemburg_raw_norm(f, two_q, Phi)
    sup_i = 0.0
    sup_ii = 0.0
    empty = j_lo_excl > t_cap and j_lo_incl > t_cap
    for j in range(min(j_lo_incl, j_lo_excl), t_cap + 1):
        box = concentric_box(grid, Q.center2, j)
        if box.is_empty:
            continue
        t = j * h
        unclipped = t**grid.dim
        if j >= j_lo_excl:
            sup_i = max(sup_i, integrate(absf, box) / unclipped ** (1.0 - gamma))
        if j >= j_lo_incl:
            psi_inv_t = _phi_inverse_of_inverse_measure(Psi, unclipped)
            sup_ii = max(sup_ii, psi_inv_t * luxemburg_raw_norm(f, box, Phi))
    rhs_i = rhs_i_head + sup_i / psi_inv_q
    rhs_ii = sup_ii / psi_inv_q
    return Prop51Record(lhs, rhs_i, rhs_ii, empty, t_cap * h)


def compat_52(phi: MorreyWeight, psi: MorreyWeight, gamma: float, grid: Grid) -> float:
    """max over scales r <= t of t^(n gamma) phi(x, t) / psi(x, r).

    Finiteness certifies the scale-compatibility hypothesis on the
    discretized range.  The implemented weight families are spatially
    uniform, so the sweep over centers x is trivial."""
    sides = np.arange(1, grid.cells_per_side + 1) * grid.h
    x = None
    num = sides ** (grid.dim * gamma) * np.asarray(phi.value(x, sides), dtype=float)
    den = np.asarray(psi.value(x, sides), dtype=float)
    # sup over t >= r realized by a reversed running max
    tail_max = np.maximum.accumulate(num[::-1])[::-1]
    return float((tail_max / den).max())


def compat_53(phi: MorreyWeight, psi: MorreyWeight, grid: Grid,
              panels: int = 4000) -> float:
    """max over l of psi(x, l) int_l^D (1/phi(x, t)) dt/t, D the domain diameter."""
    D = grid.diameter
    sides = np.arange(1, grid.cells_per_side + 1) * grid.h
    sides = sides[sides < D]
    best = 0.0
    x = None
    for l in sides:
        u = np.linspace(math.log(l), math.log(D), panels + 1)
        mid = 0.5 * (u[1:] + u[:-1])
        du = u[1] - u[0]
        integral = float(np.sum(du / np.asarray(phi.value(x, np.exp(mid)), dtype=float)))
        best = max(best, float(psi.value(x, l)) * integral)
    return best
