"""Young functions, moduli of continuity, and Morrey weight functions.

A Young function here is a parametric convex gauge A with A(0) = 0,
nondecreasing and continuous, superlinear except for the quasi-Young
linear case A(t) = t.  The module provides

* closed-form evaluation per family, a numeric inverse (bracketed
  bisection), and a numeric conjugate sup_t (s t - A(t)) (ternary search),
* both Luxemburg norms over a cube: the mean-normalized norm
  inf {lam : avg_Q A(|f|/lam) <= 1} and the raw norm with the plain
  integral in place of the average,
* the Dini integral of a modulus of continuity with a documented
  divergence heuristic, and
* the bump norm ( int_1^inf A(t)^(q/p) t^-q dt/t )^(1/q) with 1/q = 1/p - alpha,
  whose finiteness defines the integrability classes used by the
  two-weight results.

Divergence detection is heuristic.  Both integral classifiers compare
per-decade contributions: a clearly geometric decay is convergent, a
decade ratio above RATIO_DIVERGENT is divergent, and the gray zone is
resolved by fitting the decay exponent a of s_k ~ k^-a (divergent iff
a <= EXPONENT_BORDERLINE).  The analytic families used in tests have
known ground truth for all branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Box, Cube, SampledFunction

__all__ = [
    "YoungFunction",
    "PowerGauge",
    "ScaledPowerGauge",
    "PowerLogGauge",
    "ExpPowerGauge",
    "LinearGauge",
    "ConjugateGauge",
    "ModulusOmega",
    "HolderModulus",
    "LogModulus",
    "BorderlineLogModulus",
    "MorreyWeight",
    "PowerLawWeight",
    "TabulatedWeight",
    "evaluate",
    "inverse",
    "conjugate",
    "luxemburg_mean_norm",
    "luxemburg_raw_norm",
    "dini_integral",
    "bump_norm",
    "young_from_json",
    "modulus_from_json",
    "morrey_weight_from_json",
]

INVERSE_RTOL = 1e-13
CONJUGATE_RTOL = 1e-12
LUXEMBURG_RTOL = 1e-13

# Divergence-heuristic thresholds (see module docstring).
RATIO_GEOMETRIC = 0.90
RATIO_DIVERGENT = 0.99
EXPONENT_BORDERLINE = 1.10


class YoungFunction:
    """Base class for the parametric gauges; subclasses define value()."""

    family = "abstract"

    def value(self, t):
        raise NotImplementedError

    def log_value(self, t):
        """log A(t), overridable where A overflows."""
        with np.errstate(divide="ignore"):
            return np.log(self.value(t))

    # (p, scale) such that A(t) = scale * t^p, or None.  Pure-power gauges
    # admit exact closed forms used by the vectorized cube sweeps.
    def power_form(self) -> tuple[float, float] | None:
        return None

    def doubling_constant(self) -> float | None:
        """A bound on sup_t A(2t)/A(t), or None when A is not doubling."""
        return None

    def inverse(self, u: float) -> float:
        """t with A(t) = u, by doubling bracket plus bisection."""
        if u < 0:
            raise ValueError("inverse requires u >= 0")
        if u == 0:
            return 0.0
        lo, hi = 1.0, 1.0
        for _ in range(2200):
            if self.value(hi) >= u:
                break
            hi *= 2.0
        for _ in range(2200):
            if self.value(lo) <= u:
                break
            lo /= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.value(mid) < u:
                lo = mid
            else:
                hi = mid
            if hi - lo <= INVERSE_RTOL * hi:
                break
        return 0.5 * (lo + hi)

    def conjugate_value(self, s: float) -> float:
        """sup_{t>=0} (s t - A(t)), ternary search on the concave objective."""
        if s < 0:
            raise ValueError("conjugate requires s >= 0")
        if s == 0:
            return 0.0
        g = lambda t: s * t - self.value(t)
        hi = 1.0
        for _ in range(400):
            if g(2.0 * hi) <= g(hi):
                break
            hi *= 2.0
        else:
            return math.inf
        lo, hi = 0.0, 2.0 * hi
        for _ in range(300):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if g(m1) < g(m2):
                lo = m1
            else:
                hi = m2
            if hi - lo <= CONJUGATE_RTOL * max(1.0, hi):
                break
        return max(0.0, g(0.5 * (lo + hi)))

    def conjugate_values(self, s: np.ndarray) -> np.ndarray:
        """Vectorized conjugate for arrays of s >= 0."""
        s = np.asarray(s, dtype=float)
        out = np.empty_like(s)
        flat_s = s.ravel()
        flat_o = out.ravel()
        g = lambda t: flat_s * t - self.value(t)
        hi = np.ones_like(flat_s)
        grew = np.ones(flat_s.shape, dtype=bool)
        for _ in range(400):
            cand = np.where(grew, 2.0 * hi, hi)
            grew = grew & (flat_s * cand - self.value(cand) > flat_s * hi - self.value(hi))
            hi = np.where(grew, cand, hi)
            if not grew.any():
                break
        unbounded = grew  # objective still rising after the full doubling budget
        lo = np.zeros_like(hi)
        hi = 2.0 * hi
        for _ in range(300):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            take = g(m1) < g(m2)
            lo = np.where(take, m1, lo)
            hi = np.where(~take, m2, hi)
        t = 0.5 * (lo + hi)
        flat_o[:] = np.maximum(0.0, flat_s * t - self.value(t))
        flat_o[unbounded] = math.inf
        flat_o[flat_s == 0] = 0.0
        return out

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerGauge(YoungFunction):
    """A(t) = t^p, p > 1."""

    p: float
    family = "power"

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("power gauge requires p > 1")

    def value(self, t):
        return np.power(t, self.p)

    def power_form(self):
        return (self.p, 1.0)

    def doubling_constant(self):
        return 2.0**self.p

    def to_json(self):
        return {"family": "power", "p": self.p}


@dataclass(frozen=True)
class ScaledPowerGauge(YoungFunction):
    """A(t) = a t^p, a > 0, p > 1."""

    p: float
    a: float
    family = "power_scaled"

    def __post_init__(self):
        if not (self.p > 1 and self.a > 0):
            raise ValueError("scaled power gauge requires p > 1 and a > 0")

    def value(self, t):
        return self.a * np.power(t, self.p)

    def power_form(self):
        return (self.p, self.a)

    def doubling_constant(self):
        return 2.0**self.p

    def to_json(self):
        return {"family": "power_scaled", "p": self.p, "a": self.a}


@dataclass(frozen=True)
class PowerLogGauge(YoungFunction):
    """A(t) = t^p (log(e + t))^a.  Requires p >= max(1, -a) for monotonicity."""

    p: float
    a: float
    family = "power_log"

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("power-log gauge requires p >= 1")
        if self.a < -self.p:
            raise ValueError("power-log gauge requires a >= -p")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return np.power(t, self.p) * np.log(np.e + t) ** self.a

    def doubling_constant(self):
        return 2.0**self.p * 2.0 ** max(self.a, 0.0)

    def to_json(self):
        return {"family": "power_log", "p": self.p, "a": self.a}


@dataclass(frozen=True)
class ExpPowerGauge(YoungFunction):
    """A(t) = exp(t^a) - 1, a >= 1.  Not doubling."""

    a: float
    family = "exp_power"

    def __post_init__(self):
        if not self.a >= 1:
            raise ValueError("exp-power gauge requires a >= 1")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return np.expm1(np.power(t, self.a))

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        ta = np.power(t, self.a)
        small = ta < 30.0
        with np.errstate(divide="ignore"):
            out = np.where(small, np.log(np.expm1(np.minimum(ta, 30.0))), ta)
        return out

    def to_json(self):
        return {"family": "exp_power", "a": self.a}


@dataclass(frozen=True)
class LinearGauge(YoungFunction):
    """A(t) = t^r with r >= 1 admitted as quasi-Young; r = 1 is the plain mean."""

    r: float = 1.0
    family = "linear"

    def __post_init__(self):
        if not self.r >= 1:
            raise ValueError("linear gauge requires r >= 1")

    def value(self, t):
        if self.r == 1.0:
            return np.asarray(t, dtype=float)
        return np.power(t, self.r)

    def power_form(self):
        return (self.r, 1.0)

    def doubling_constant(self):
        return 2.0**self.r

    def conjugate_value(self, s: float) -> float:
        if self.r == 1.0:
            if s < 0:
                raise ValueError("conjugate requires s >= 0")
            return 0.0 if s <= 1.0 else math.inf
        return super().conjugate_value(s)

    def conjugate_values(self, s: np.ndarray) -> np.ndarray:
        if self.r == 1.0:
            s = np.asarray(s, dtype=float)
            return np.where(s <= 1.0, 0.0, math.inf)
        return super().conjugate_values(s)

    def to_json(self):
        return {"family": "linear", "r": self.r}


class ConjugateGauge(YoungFunction):
    """Numeric conjugate of a base gauge, usable wherever a gauge is expected.

    Scalars and small arrays use the ternary search (1e-10 grade accuracy).
    Large batches, as they occur inside cube sweeps, use a dense Legendre
    table built once per base gauge: on a log grid of t the maximizing t for
    each s is located by bisecting the increasing slope sequence, which is
    exact up to the t-grid resolution (relative error around 1e-7)."""

    family = "conjugate"

    _TABLE_THRESHOLD = 8192
    _T_POINTS = 1 << 20
    _S_POINTS = 1 << 16

    def __init__(self, base: YoungFunction):
        self.base = base
        self._table = None

    def _ensure_table(self):
        if self._table is not None:
            return self._table
        t = np.exp(np.linspace(math.log(1e-60), math.log(1e60), self._T_POINTS + 1))
        with np.errstate(over="ignore"):
            a = np.asarray(self.base.value(t), dtype=float)
        slopes = np.diff(a) / np.diff(t)
        s = np.exp(np.linspace(math.log(1e-15), math.log(1e15), self._S_POINTS + 1))
        j = np.searchsorted(slopes, s)
        vals = np.full(s.size, -np.inf)
        with np.errstate(invalid="ignore"):
            for jj in (np.maximum(j - 1, 0), np.minimum(j, self._T_POINTS),
                       np.minimum(j + 1, self._T_POINTS)):
                cand = s * t[jj] - a[jj]
                vals = np.maximum(vals, np.where(np.isfinite(cand), cand, -np.inf))
        vals = np.maximum(vals, 0.0)
        with np.errstate(divide="ignore"):
            self._table = (np.log(s), np.log(vals))
        return self._table

    def value(self, t):
        arr = np.asarray(t, dtype=float)
        if arr.ndim == 0:
            return self.base.conjugate_value(float(arr))
        if arr.ndim == 1 and arr.size <= self._TABLE_THRESHOLD:
            return self.base.conjugate_values(arr)
        log_s, log_v = self._ensure_table()
        with np.errstate(divide="ignore"):
            out = np.exp(np.interp(np.log(np.maximum(arr, 1e-300)), log_s, log_v))
        return np.where(arr > 0, out, 0.0)

    def to_json(self):
        return {"family": "conjugate", "base": self.base.to_json()}

    def __eq__(self, other):
        return isinstance(other, ConjugateGauge) and other.base == self.base

    def __hash__(self):
        return hash(("conjugate", self.base))


class ModulusOmega:
    """Nondecreasing modulus of continuity on (0, infinity)."""

    family = "abstract"

    def value(self, t):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class HolderModulus(ModulusOmega):
    """omega(t) = t^delta, delta > 0."""

    delta: float
    family = "holder"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("holder modulus requires delta > 0")

    def value(self, t):
        return np.power(t, self.delta)

    def to_json(self):
        return {"family": "holder", "delta": self.delta}


@dataclass(frozen=True)
class LogModulus(ModulusOmega):
    """omega(t) = (log(e + 1/t))^-(1+eps), eps > 0; Dini-convergent."""

    eps: float
    family = "log"

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("log modulus requires eps > 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return np.log(np.e + 1.0 / t) ** (-(1.0 + self.eps))

    def to_json(self):
        return {"family": "log", "eps": self.eps}


@dataclass(frozen=True)
class BorderlineLogModulus(ModulusOmega):
    """omega(t) = 1/log(e/t), capped at 1 for t >= 1; Dini-divergent."""

    family = "log_borderline"

    def value(self, t):
        t = np.minimum(np.asarray(t, dtype=float), 1.0)
        return 1.0 / np.log(np.e / t)

    def to_json(self):
        return {"family": "log_borderline"}


class MorreyWeight:
    """Positive function phi(x, t), nonincreasing in t, for Morrey norms."""

    family = "abstract"

    def value(self, x, t):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLawWeight(MorreyWeight):
    """phi(x, t) = t^sigma with sigma < 0 (so phi(x, 0+) = infinity)."""

    sigma: float
    family = "power_law"

    def __post_init__(self):
        if not self.sigma < 0:
            raise ValueError("power-law Morrey weight requires sigma < 0")

    def value(self, x, t):
        return np.power(t, self.sigma)

    def to_json(self):
        return {"family": "power_law", "sigma": self.sigma}


@dataclass(frozen=True)
class TabulatedWeight(MorreyWeight):
    """Table of phi values over t, log-linear interpolation, constant ends.

    Tables are spatially uniform: the x argument is accepted and ignored.
    """

    t_values: tuple[float, ...]
    values: tuple[float, ...]
    family = "tabulated"

    def __post_init__(self):
        t = np.asarray(self.t_values, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.size != v.size or t.size < 2:
            raise ValueError("tabulated weight needs matching t/value tables of length >= 2")
        if not (np.all(np.diff(t) > 0) and np.all(t > 0)):
            raise ValueError("t table must be positive and strictly increasing")
        if not np.all(v > 0):
            raise ValueError("phi values must be positive")
        if np.any(np.diff(v) > 0):
            raise ValueError("phi must be nonincreasing in t")

    def value(self, x, t):
        logt = np.log(np.asarray(t, dtype=float))
        table_t = np.log(np.asarray(self.t_values))
        table_v = np.asarray(self.values)
        return np.interp(logt, table_t, table_v)

    def to_json(self):
        return {"family": "tabulated", "t": list(self.t_values), "values": list(self.values)}


# ---------------------------------------------------------------------------
# spec-named operation wrappers

def evaluate(A: YoungFunction, t: float) -> float:
    if np.any(np.asarray(t) < 0):
        raise ValueError("gauges are defined for t >= 0")
    return A.value(t)


def inverse(A: YoungFunction, u: float) -> float:
    return A.inverse(u)


def conjugate(A: YoungFunction, s: float) -> float:
    return A.conjugate_value(s)


# ---------------------------------------------------------------------------
# Luxemburg norms

def _luxemburg_bisect(scaled_condition, vmax: float) -> float:
    """Smallest lam with scaled_condition(lam) <= 1; condition nonincreasing."""
    if vmax == 0.0:
        return 0.0
    hi = vmax
    for _ in range(300):
        if scaled_condition(hi) <= 1.0:
            break
        hi *= 2.0
    lo = hi
    for _ in range(300):
        cand = lo / 2.0
        if cand <= 0.0 or scaled_condition(cand) > 1.0:
            break
        lo = cand
    lo = lo / 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if scaled_condition(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= LUXEMBURG_RTOL * hi:
            break
    return hi


def _region_values(f: SampledFunction, Q: Cube | Box) -> np.ndarray:
    if Q.grid != f.grid:
        raise ValueError("cube grid does not match function grid")
    return np.abs(f.values[Q.slices]).ravel()


def luxemburg_mean_norm(f: SampledFunction, Q: Cube | Box, A: YoungFunction) -> float:
    """inf { lam > 0 : avg_Q A(|f|/lam) <= 1 }, by bisection."""
    vals = _region_values(f, Q)
    vmax = float(vals.max(initial=0.0))
    if vmax == 0.0:
        return 0.0
    cond = lambda lam: float(np.mean(A.value(vals / lam)))
    return _luxemburg_bisect(cond, vmax)


def luxemburg_raw_norm(f: SampledFunction, Q: Cube | Box, A: YoungFunction) -> float:
    """inf { lam > 0 : int_Q A(|f|/lam) <= 1 }, by bisection.

    The unit-level condition is the standard <= 1 infimum; for continuous
    strictly increasing gauges this coincides with requiring equality.
    """
    vals = _region_values(f, Q)
    vmax = float(vals.max(initial=0.0))
    if vmax == 0.0:
        return 0.0
    cellm = f.grid.h**f.grid.dim
    cond = lambda lam: float(np.sum(A.value(vals / lam))) * cellm
    return _luxemburg_bisect(cond, vmax)


def mean_norm_of_values(vals: np.ndarray, A: YoungFunction) -> float:
    """Mean-normalized Luxemburg norm of a flat value array (one cell each)."""
    vals = np.abs(np.asarray(vals, dtype=float).ravel())
    vmax = float(vals.max(initial=0.0))
    if vmax == 0.0:
        return 0.0
    cond = lambda lam: float(np.mean(A.value(vals / lam)))
    return _luxemburg_bisect(cond, vmax)


def batched_mean_norms(windows: np.ndarray, A: YoungFunction,
                       total_cells: int | None = None, iters: int = 120) -> np.ndarray:
    """Mean-normalized Luxemburg norms for each row of a (ncubes, m) matrix.

    When total_cells is given, each row is treated as living inside a larger
    region of that many cells and vanishing off the listed columns."""
    w = np.abs(windows)
    scale = 1.0 if total_cells is None else w.shape[1] / float(total_cells)
    vmax = w.max(axis=1)
    live = vmax > 0
    out = np.zeros(w.shape[0])
    if not live.any():
        return out
    wl = w[live]
    hi = vmax[live].copy()
    cond = lambda lam: np.mean(A.value(wl / lam[:, None]), axis=1) * scale
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
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        good = cond(mid) <= 1.0
        hi = np.where(good, mid, hi)
        lo = np.where(good, lo, mid)
    out[live] = hi
    return out


# ---------------------------------------------------------------------------
# Dini integral

DINI_LOG_LO = -40.0
DINI_PANELS = 100_000


def _classify_decay(decade_sums: np.ndarray) -> bool:
    """True when the tail of positive per-decade sums indicates divergence."""
    s = decade_sums[decade_sums > 0]
    if s.size < 4:
        return False
    ratios = s[1:] / s[:-1]
    rho = float(np.mean(ratios[-3:]))
    if rho > RATIO_DIVERGENT:
        return True
    if rho < RATIO_GEOMETRIC:
        return False
    k = np.arange(1, s.size + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.log(s[:-1] / s[1:]) / np.log(k[1:] / k[:-1])
    a_tail = float(np.mean(a[-3:]))
    return a_tail <= EXPONENT_BORDERLINE


def dini_integral(omega: ModulusOmega, c_n: float) -> tuple[float, bool]:
    """int_0^1 omega(c_n t) dt/t on [e^-40, 1], with a divergence flag."""
    if not c_n > 0:
        raise ValueError("c_n must be positive")
    u = np.linspace(DINI_LOG_LO, 0.0, DINI_PANELS + 1)
    mid = 0.5 * (u[1:] + u[:-1])
    du = u[1] - u[0]
    g = omega.value(c_n * np.exp(mid))
    value = float(np.sum(g * du))
    # decade sums over t in [10^-(d+1), 10^-d]
    decades = np.floor(-mid / math.log(10.0)).astype(int)
    dmax = int(-DINI_LOG_LO / math.log(10.0))  # last complete decade index + 1
    sums = np.zeros(dmax)
    for d in range(dmax):
        sums[d] = np.sum(g[decades == d] * du)
    return value, _classify_decay(sums)


# ---------------------------------------------------------------------------
# bump norm

BUMP_LOG_HI = math.log(1e8)
BUMP_PANELS = 200_000


def bump_norm(A: YoungFunction, alpha: float, p: float) -> tuple[float, bool]:
    """( int_1^inf A(t)^(q/p) t^-q dt/t )^(1/q) with 1/q = 1/p - alpha.

    Log-spaced quadrature up to t = 1e8 with a power-law tail
    extrapolation; flagged divergent when the fitted integrand exponent
    at the cutoff is >= -1.  The lower limit is fixed at 1, so reported
    values are relative to that choice (membership does not depend on it).
    """
    if not (0 <= alpha < 1):
        raise ValueError("bump norm requires 0 <= alpha < 1")
    if not p > 1:
        raise ValueError("bump norm requires p > 1")
    if alpha > 0 and p >= 1.0 / alpha:
        raise ValueError("bump norm requires p < 1/alpha when alpha > 0")
    q = 1.0 / (1.0 / p - alpha)
    u = np.linspace(0.0, BUMP_LOG_HI, BUMP_PANELS + 1)
    mid = 0.5 * (u[1:] + u[:-1])
    du = u[1] - u[0]
    t = np.exp(mid)
    # integrand of the dt/t form, evaluated in log space
    log_g = (q / p) * A.log_value(t) - q * mid
    # fitted d(log g)/d(log t) over the last decade, shifted by -1 for dt
    k = max(1, int(math.log(10.0) / du))
    exponent = float((log_g[-1] - log_g[-1 - k]) / (mid[-1] - mid[-1 - k])) - 1.0
    divergent = exponent >= -1.0 or not np.isfinite(log_g[-1])
    with np.errstate(over="ignore"):
        g = np.exp(log_g)
    integral = float(np.sum(g * du))
    if divergent or not np.isfinite(integral):
        return math.inf, True
    tail = g[-1] * np.exp(0.5 * du) / (-(exponent + 1.0))  # g(T) * T / (-e-1) in dt/t form
    return (integral + tail) ** (1.0 / q), False


# ---------------------------------------------------------------------------
# JSON constructors

_YOUNG_FAMILIES = {
    "power": lambda d: PowerGauge(p=float(d["p"])),
    "power_scaled": lambda d: ScaledPowerGauge(p=float(d["p"]), a=float(d["a"])),
    "power_log": lambda d: PowerLogGauge(p=float(d["p"]), a=float(d["a"])),
    "exp_power": lambda d: ExpPowerGauge(a=float(d["a"])),
    "linear": lambda d: LinearGauge(r=float(d.get("r", 1.0))),
}


def young_from_json(data: dict) -> YoungFunction:
    fam = data.get("family")
    if fam == "conjugate":
        return ConjugateGauge(young_from_json(data["base"]))
    if fam not in _YOUNG_FAMILIES:
        raise ValueError(f"unknown Young-function family {fam!r}")
    return _YOUNG_FAMILIES[fam](data)


def modulus_from_json(data: dict) -> ModulusOmega:
    fam = data.get("family")
    if fam == "holder":
        return HolderModulus(delta=float(data["delta"]))
    if fam == "log":
        return LogModulus(eps=float(data["eps"]))
    if fam == "log_borderline":
        return BorderlineLogModulus()
    raise ValueError(f"unknown modulus family {fam!r}")


def morrey_weight_from_json(data: dict) -> MorreyWeight:
    fam = data.get("family")
    if fam == "power_law":
        return PowerLawWeight(sigma=float(data["sigma"]))
    if fam == "tabulated":
        return TabulatedWeight(t_values=tuple(data["t"]), values=tuple(data["values"]))
    raise ValueError(f"unknown Morrey weight family {fam!r}")
