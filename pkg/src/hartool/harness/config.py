"""Experiment configuration: JSON schema, defaults, and hypothesis validation.

A config names one inequality of the verification catalog, the grids to run
it on, the analytic parameters, and descriptors for the kernel, gauges,
scale weights, cube family and test-function suites.  Validation rejects
exactly the configs that violate a stated hypothesis, with the failed
hypothesis named in the error message.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from ..gauges import (LinearGauge, PowerGauge, YoungFunction, modulus_from_json,
                      morrey_weight_from_json, young_from_json)
from ..geometry import CubeFamily, Grid
from ..operators import KernelSpec, kernel_from_json

__all__ = ["ConfigError", "ExperimentConfig", "INEQUALITY_CATALOG", "default_config"]


class ConfigError(ValueError):
    """A config violates a stated hypothesis; the message names it."""


INEQUALITY_CATALOG: dict[str, dict] = {
    "eq12": {
        "summary": "pointwise domination of the fractional maximal function by "
                   "the fractional integral of |f|, with explicit constant",
        "params": ["gamma", "dim", "grid_sizes", "suite", "family"],
    },
    "thm21": {
        "summary": "local sharp maximal of the kernel transform bounded by the "
                   "order-r fractional maximal function",
        "params": ["gamma", "r", "s", "kernel", "suite", "family"],
    },
    "thm22": {
        "summary": "local sharp maximal of the transform bounded via the "
                   "conjugate-gauge fractional maximal function",
        "params": ["gamma", "s", "kernel", "gauge_a", "suite", "family"],
    },
    "thm23": {
        "summary": "local sharp maximal bound for products of "
                   "invertible-coefficient power kernels",
        "params": ["gamma", "s", "kernel(homogeneous)", "suite", "family"],
    },
    "thm31": {
        "summary": "weighted local mean of Phi(|Tf - median|) bounded by the "
                   "weighted mean of Phi of the fractional maximal function",
        "params": ["gamma", "r", "gauge_phi", "weight_pair", "t_scan", "suite", "weight_suite"],
    },
    "eq33": {
        "summary": "global weighted Phi-integral of |Tf| bounded when the "
                   "medians of Tf decay on growing cubes",
        "params": ["gamma", "r", "gauge_phi", "weight_pair", "suite", "weight_suite"],
    },
    "lem41": {
        "summary": "sharp median of Tf on random cubes bounded by the "
                   "lambda-weighted dilate sums of f",
        "params": ["gamma", "r", "s", "omega", "c_n", "cube_samples", "suite"],
    },
    "eq45_check": {
        "summary": "finiteness and refinement stability of the two-weight bump product",
        "params": ["gamma", "r", "p", "q", "gauge_a", "gauge_b", "weight_suite"],
    },
    "thm42": {
        "summary": "two-weight strong bound: weighted q-norm of Tf by the "
                   "weighted p-norm of f under the bump condition",
        "params": ["gamma", "r", "p", "q", "alpha1", "alpha2", "gauge_a", "gauge_b", "suite"],
    },
    "prop51": {
        "summary": "localization gap for the fractional maximal operator on sampled cubes",
        "params": ["gamma", "p", "c_n", "d_n", "cube_samples", "suite"],
    },
    "thm52": {
        "summary": "Morrey-to-Morrey boundedness of the fractional maximal operator",
        "params": ["gamma", "p", "morrey_phi", "morrey_psi", "suite", "family"],
    },
    "thm53": {
        "summary": "Morrey boundedness of sublinear operators dominated by the "
                   "fractional kernel",
        "params": ["gamma", "p", "morrey_phi", "morrey_psi", "operators", "suite", "family"],
    },
    "eq19": {
        "summary": "Campanato seminorm of Tf bounded by the Morrey norm of the "
                   "fractional maximal function",
        "params": ["gamma", "q", "morrey_psi", "kernel", "suite", "family"],
    },
}


@dataclass
class ExperimentConfig:
    inequality_id: str
    dim: int = 1
    grid_sizes: tuple[int, ...] = (64, 128)
    side_length: float = 1.0
    origin: tuple[float, ...] | None = None
    seed: int = 7
    stability_factor: float = 2.0
    threads: int = 1

    gamma: float = 0.5
    r: float = 1.0
    s: float = 0.5
    p: float = 2.0
    q: float = 4.0
    beta: float = 1.0
    alpha: float | None = None
    alpha1: float | None = None
    alpha2: float | None = None
    weight_order: float = 1.0
    c_n: float | None = None
    d_n: float | None = None
    t_scan: tuple[float, ...] = (0.55, 0.65, 0.75, 0.85)
    cube_samples: int = 20
    lambda_source: str = "omega"
    operators: tuple[str, ...] = ("maximal", "riesz")

    kernel: dict | None = None
    gauge_a: dict | None = None
    gauge_b: dict | None = None
    gauge_phi: dict | None = None
    omega: dict | None = None
    morrey_phi: dict | None = None
    morrey_psi: dict | None = None
    family: dict = field(default_factory=lambda: {"kind": "all"})
    suite: dict = field(default_factory=lambda: {"kind": "mixed", "count": 8})
    weight_suite: dict = field(default_factory=lambda: {"kind": "mixed_weights", "count": 4})
    weight_pair: dict = field(default_factory=lambda: {"mode": "maximal"})

    # ------------------------------------------------------------------ io

    @classmethod
    def from_json(cls, data: dict | str) -> "ExperimentConfig":
        if isinstance(data, str):
            data = json.loads(data)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("grid_sizes", "origin", "t_scan", "operators"):
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = tuple(kwargs[key])
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def to_json_dict(self) -> dict:
        out = asdict(self)
        for key in ("grid_sizes", "origin", "t_scan", "operators"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out

    # ------------------------------------------------------------- resolution

    def resolved_origin(self) -> tuple[float, ...]:
        if self.origin is not None:
            return tuple(self.origin)
        if self.inequality_id == "thm23":
            # centered domain so the coefficient maps send it into itself
            return (-self.side_length / 2.0,) * self.dim
        return (0.0,) * self.dim

    def grid_for(self, n: int) -> Grid:
        return Grid(self.dim, n, self.side_length, self.resolved_origin())

    def family_for(self, grid: Grid) -> CubeFamily:
        return CubeFamily.from_json(grid, self.family)

    def resolved_c_n(self) -> float:
        return self.c_n if self.c_n is not None else 2.0 * math.sqrt(self.dim)

    def resolved_d_n(self) -> float:
        return self.d_n if self.d_n is not None else 2.0 * math.sqrt(self.dim)

    def resolved_kernel(self) -> KernelSpec:
        if self.kernel is not None:
            data = dict(self.kernel)
            data.setdefault("dim", self.dim)
            return kernel_from_json(data)
        if self.inequality_id == "thm23":
            g = self.gamma
            return kernel_from_json({
                "variant": "homogeneous", "dim": self.dim, "gamma": g,
                "coeffs": [1.0, -1.0] if self.dim == 1 else [[[1.0, 0.0], [0.0, 1.0]], [[-1.0, 0.0], [0.0, -1.0]]],
                "exponents": [self.dim * (1 - g) / 2.0] * 2,
            })
        return kernel_from_json({"variant": "riesz", "dim": self.dim, "gamma": self.gamma})

    def resolved_gauge(self, slot: str) -> YoungFunction:
        data = getattr(self, slot)
        if data is not None:
            return young_from_json(data)
        if slot == "gauge_phi":
            return LinearGauge(1.0)
        if slot == "gauge_a":
            return PowerGauge(5.0) if self.inequality_id in ("thm42", "eq45_check") else PowerGauge(2.0)
        if slot == "gauge_b":
            return PowerGauge(3.0)
        raise KeyError(slot)

    def resolved_omega(self):
        if self.omega is not None:
            return modulus_from_json(self.omega)
        return modulus_from_json({"family": "holder", "delta": 1.0})

    def resolved_morrey(self, slot: str):
        data = getattr(self, slot)
        if data is not None:
            return morrey_weight_from_json(data)
        ngamma = self.dim * self.gamma
        if slot == "morrey_phi":
            return morrey_weight_from_json({"family": "power_law", "sigma": -0.15 - ngamma})
        return morrey_weight_from_json({"family": "power_law", "sigma": -0.15})

    def morrey_exponent_pair(self) -> tuple[float, float]:
        """(p, q) with 1/q = 1/p - gamma for the matched power gauges."""
        q = 1.0 / (1.0 / self.p - self.gamma)
        return self.p, q

    def resolved_alphas(self) -> tuple[float, float, float]:
        alpha = 1.0 / self.p - 1.0 / self.q
        a1 = self.alpha1 if self.alpha1 is not None else alpha / 2.0
        a2 = self.alpha2 if self.alpha2 is not None else alpha - a1
        return alpha, a1, a2

    # ------------------------------------------------------------- validation

    def validate(self) -> None:
        if self.inequality_id not in INEQUALITY_CATALOG:
            raise ConfigError(f"unknown inequality id {self.inequality_id!r}; "
                              f"known: {sorted(INEQUALITY_CATALOG)}")
        if self.dim not in (1, 2):
            raise ConfigError("hypothesis violated: dim must be 1 or 2")
        if not self.grid_sizes:
            raise ConfigError("hypothesis violated: at least one grid size required")
        for n in self.grid_sizes:
            if n < 2 or (n & (n - 1)):
                raise ConfigError(f"hypothesis violated: grid sizes must be powers of 2, got {n}")
        if list(self.grid_sizes) != sorted(self.grid_sizes):
            raise ConfigError("hypothesis violated: grid sizes must be ascending")
        if not self.stability_factor >= 1.0:
            raise ConfigError("hypothesis violated: stability factor must be >= 1")
        if self.threads < 1:
            raise ConfigError("hypothesis violated: threads must be >= 1")
        if not 0 < self.s <= 0.5:
            raise ConfigError("hypothesis violated: s must lie in (0, 1/2]")
        if not self.r >= 1:
            raise ConfigError("hypothesis violated: r must be >= 1")
        needs_kernel_gamma = self.inequality_id in (
            "eq12", "thm21", "thm22", "thm23", "thm31", "eq33", "lem41", "thm42", "eq19")
        if needs_kernel_gamma and not 0 < self.gamma < 1:
            raise ConfigError("hypothesis violated: gamma must lie in (0, 1)")
        if not needs_kernel_gamma and not 0 <= self.gamma < 1:
            raise ConfigError("hypothesis violated: gamma must lie in [0, 1)")
        for t in self.t_scan:
            if not 0.5 < t < 1:
                raise ConfigError("hypothesis violated: median levels t must lie in (1/2, 1)")
        if self.lambda_source not in ("omega", "hormander"):
            raise ConfigError("hypothesis violated: lambda_source must be omega or hormander")
        if self.inequality_id == "thm42":
            if not self.r < self.p < self.q:
                raise ConfigError("hypothesis violated: thm42 needs r < p < q, got "
                                  f"r={self.r}, p={self.p}, q={self.q}")
            if not self.gamma * self.r < 1:
                raise ConfigError("hypothesis violated: thm42 needs gamma * r < 1")
            alpha = 1.0 / self.p - 1.0 / self.q
            _, a1, a2 = self.resolved_alphas()
            if a1 < 0 or a2 < 0:
                raise ConfigError("hypothesis violated: alpha1, alpha2 must be nonnegative")
            if abs((a1 + a2) - alpha) > 1e-12:
                raise ConfigError("hypothesis violated: alpha1 + alpha2 must equal 1/p - 1/q")
        if self.inequality_id == "eq45_check":
            if not self.r < self.p < self.q:
                raise ConfigError("hypothesis violated: bump product needs r < p < q")
        if self.inequality_id in ("prop51", "thm52", "thm53", "eq19"):
            if self.inequality_id != "eq19":
                if not 1.0 / self.p - self.gamma > 0:
                    raise ConfigError("hypothesis violated: matched-exponent relation needs "
                                      "gamma < 1/p (so that 1/q = 1/p - gamma is positive)")
            # morrey weights must construct
            self.resolved_morrey("morrey_phi")
            self.resolved_morrey("morrey_psi")
        if self.inequality_id == "thm23":
            k = self.resolved_kernel()
            if k.to_json().get("variant") != "homogeneous":
                raise ConfigError("hypothesis violated: thm23 requires a homogeneous kernel")
        if self.inequality_id == "thm53":
            for op in self.operators:
                if op not in ("maximal", "riesz"):
                    raise ConfigError(f"hypothesis violated: unknown operator {op!r} for thm53")
            if "riesz" in self.operators and not self.gamma > 0:
                raise ConfigError("hypothesis violated: the fractional integral operator "
                                  "requires gamma > 0 (drop it from operators for gamma = 0)")
        if self.inequality_id == "eq19" and not self.q > 1:
            raise ConfigError("hypothesis violated: eq19 needs a gauge exponent q > 1")
        if self.weight_pair.get("mode", "maximal") not in ("maximal", "same", "condition_f", "unit"):
            raise ConfigError("hypothesis violated: weight_pair mode must be one of "
                              "maximal, same, condition_f, unit")
        # descriptor sanity: everything must construct
        self.resolved_kernel() if needs_kernel_gamma else None
        self.resolved_gauge("gauge_phi")
        self.resolved_omega()


def default_config(inequality_id: str, **overrides) -> ExperimentConfig:
    """A runnable config for the given inequality with desk-scale defaults."""
    base: dict = {"inequality_id": inequality_id}
    if inequality_id == "eq12":
        base.update(grid_sizes=(64, 128), suite={"kind": "mixed", "count": 8})
    elif inequality_id == "thm21":
        base.update(grid_sizes=(128, 256), suite={"kind": "mixed", "count": 8})
    elif inequality_id == "thm22":
        base.update(grid_sizes=(64, 128), family={"kind": "dyadic"},
                    gauge_a={"family": "power", "p": 2.0},
                    suite={"kind": "mixed", "count": 6})
    elif inequality_id == "thm23":
        base.update(grid_sizes=(128, 256), suite={"kind": "compact", "count": 6})
    elif inequality_id == "thm31":
        base.update(grid_sizes=(128, 256), suite={"kind": "mixed", "count": 10},
                    weight_suite={"kind": "mixed_weights", "count": 10})
    elif inequality_id == "eq33":
        base.update(grid_sizes=(64, 128), suite={"kind": "compact", "count": 6},
                    weight_suite={"kind": "mixed_weights", "count": 4})
    elif inequality_id == "lem41":
        base.update(grid_sizes=(64, 128), suite={"kind": "compact", "count": 5},
                    cube_samples=20)
    elif inequality_id == "eq45_check":
        base.update(grid_sizes=(32, 64), p=2.0, q=4.0,
                    gauge_a={"family": "power", "p": 5.0},
                    gauge_b={"family": "power", "p": 3.0},
                    weight_suite={"kind": "mixed_weights", "count": 4})
    elif inequality_id == "thm42":
        base.update(grid_sizes=(64, 128), gamma=0.2, p=2.0, q=4.0,
                    gauge_a={"family": "power", "p": 5.0},
                    gauge_b={"family": "power", "p": 3.0},
                    suite={"kind": "compact", "count": 6},
                    weight_pair={"mode": "unit"})
    elif inequality_id == "prop51":
        base.update(grid_sizes=(64, 128), gamma=0.25, p=2.0,
                    suite={"kind": "mixed", "count": 6}, cube_samples=8)
    elif inequality_id == "thm52":
        base.update(grid_sizes=(128, 256), gamma=0.25, p=2.0,
                    morrey_phi={"family": "power_law", "sigma": -0.4},
                    morrey_psi={"family": "power_law", "sigma": -0.15},
                    suite={"kind": "mixed", "count": 8})
    elif inequality_id == "thm53":
        base.update(grid_sizes=(32, 64), gamma=0.25, p=2.0,
                    morrey_phi={"family": "power_law", "sigma": -0.4},
                    morrey_psi={"family": "power_law", "sigma": -0.15},
                    suite={"kind": "mixed", "count": 6})
    elif inequality_id == "eq19":
        base.update(grid_sizes=(64, 128), gamma=0.25, q=2.0,
                    morrey_psi={"family": "power_law", "sigma": -0.15},
                    suite={"kind": "compact", "count": 6})
    base.update(overrides)
    cfg = ExperimentConfig(**base)
    cfg.validate()
    return cfg
