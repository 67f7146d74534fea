import math

import numpy as np
import pytest

from hartool import Cube, Grid, RieszKernel, SampledFunction, integrate
from hartool.harness import (ConfigError, ExperimentConfig, default_config,
                             generate_suite, median_decay_check,
                             reevaluate_witness, refinement_study, run_inequality)
from hartool.harness.inequalities import RatioCollector
from hartool.harness.report import sanitize
from hartool.harness.suite import draw_suite_params


# ----------------------------------------------------------------- config

def test_config_rejects_unknown_id_and_fields():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json({"inequality_id": "thm99"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json({"inequality_id": "eq12", "bogus": 1})


def test_config_named_hypothesis_messages():
    with pytest.raises(ConfigError, match="r < p < q"):
        default_config("thm42", p=5.0, q=2.0)
    with pytest.raises(ConfigError, match="gamma \\* r < 1"):
        default_config("thm42", gamma=0.6, r=2.0, p=3.0, q=4.0)
    with pytest.raises(ConfigError, match="alpha1 \\+ alpha2"):
        default_config("thm42", alpha1=0.3, alpha2=0.3)
    with pytest.raises(ConfigError, match="matched-exponent"):
        default_config("thm52", gamma=0.6, p=2.0)
    with pytest.raises(ConfigError, match="powers of 2"):
        default_config("eq12", grid_sizes=(48,))
    with pytest.raises(ConfigError, match="homogeneous"):
        default_config("thm23", kernel={"variant": "riesz", "gamma": 0.5})


def test_config_round_trip():
    cfg = default_config("thm21")
    back = ExperimentConfig.from_json(cfg.to_json_dict())
    assert back.to_json_dict() == cfg.to_json_dict()


# ----------------------------------------------------------------- suites

def test_suite_params_grid_independent_and_deterministic():
    desc = {"kind": "mixed", "count": 6}
    p1 = draw_suite_params(desc, 1, seed=9)
    p2 = draw_suite_params(desc, 1, seed=9)
    assert p1 == p2
    assert draw_suite_params(desc, 1, seed=10) != p1


def test_suite_realization_properties():
    g = Grid(1, 64)
    fns = generate_suite({"kind": "mixed", "count": 8}, g, seed=4)
    assert len(fns) == 8
    ind = fns[0]
    assert ind.name.startswith("indicator")
    # an indicator integrates to the measure of its cell set
    full = Cube(g, (0,), 64)
    assert integrate(ind, full) == pytest.approx(np.count_nonzero(ind.values) * g.h)
    step = fns[2]
    assert len(np.unique(step.values)) >= 3
    weights = generate_suite({"kind": "mixed_weights", "count": 4}, g, seed=4)
    for w in weights:
        assert np.all(w.values > 0)


def test_suite_same_seed_same_bytes():
    g = Grid(2, 16)
    a = generate_suite({"kind": "compact", "count": 5}, g, seed=1)
    b = generate_suite({"kind": "compact", "count": 5}, g, seed=1)
    for fa, fb in zip(a, b):
        np.testing.assert_array_equal(fa.values, fb.values)


# ----------------------------------------------------------------- collector

def test_collector_zero_cases():
    col = RatioCollector()
    col.add_array(np.zeros(4), np.zeros(4), {"function": 0})
    res = col.finalize()
    assert res["c_emp"] == 0.0 and res["skipped"] == 4 and not res["failures"]

    col = RatioCollector()
    col.add_array(np.array([1.0, 0.0]), np.array([0.0, 0.0]), {"function": 0})
    res = col.finalize()
    assert res["failures"] and res["failures"][0]["reason"] == "rhs zero with positive lhs"


def test_collector_excludes_near_zero_rhs():
    col = RatioCollector()
    col.add_array(np.array([1.0, 1.0]), np.array([1.0, 1e-20]), {"function": 0})
    res = col.finalize()
    assert res["excluded"] == 1 and res["c_emp"] == pytest.approx(1.0)


# ----------------------------------------------------------------- gates

def test_median_decay_cases():
    g = Grid(1, 64)
    k = RieszKernel(1, 0.5)
    zero = SampledFunction.constant(g, 0.0)
    assert median_decay_check(k, zero, 0.75).flag
    x = g.cell_centers()[:, 0]
    bump = SampledFunction(g, np.exp(-((x - 0.5) ** 2) * 200.0))
    assert median_decay_check(k, bump, 0.75).flag
    one = SampledFunction.constant(g, 1.0)
    assert not median_decay_check(k, one, 0.75).flag


# ----------------------------------------------------------------- runs

def test_run_inequality_reports_and_stability():
    cfg = default_config("eq12", grid_sizes=(32, 64), suite={"kind": "mixed", "count": 4})
    rep = run_inequality(cfg)
    assert rep.passed and rep.stability_verdict
    assert [g.n for g in rep.grids] == [32, 64]
    for g in rep.grids:
        assert g.witness is not None
        assert g.c_emp <= g.extra["allowed"]
    payload = rep.to_json_dict()
    assert payload["schema_version"] == 1
    assert payload["config"]["inequality_id"] == "eq12"
    assert "singular_cell_policy" in payload["metadata"]


def test_reports_byte_identical_across_runs_and_threads():
    kw = dict(grid_sizes=(32, 64), suite={"kind": "mixed", "count": 4})
    base = run_inequality(default_config("thm21", **kw)).to_json_bytes()
    again = run_inequality(default_config("thm21", **kw)).to_json_bytes()
    threaded = run_inequality(default_config("thm21", threads=4, **kw)).to_json_bytes()
    assert base == again
    assert base == threaded  # thread count is an execution detail, not report content


def test_witness_reevaluation_reproduces_ratio():
    cfg = default_config("eq12", grid_sizes=(32,), suite={"kind": "mixed", "count": 3})
    rep = run_inequality(cfg)
    wit = rep.grids[0].witness
    lhs, rhs = reevaluate_witness(cfg, 32, wit)
    assert lhs / rhs == pytest.approx(wit["ratio"], rel=1e-12)
    cfg = default_config("lem41", grid_sizes=(32,), suite={"kind": "compact", "count": 2},
                         cube_samples=4)
    rep = run_inequality(cfg)
    wit = rep.grids[0].witness
    lhs, rhs = reevaluate_witness(cfg, 32, wit)
    assert lhs / rhs == pytest.approx(wit["ratio"], rel=1e-12)


def test_refinement_study_requires_two_sizes():
    cfg = default_config("eq12", grid_sizes=(32,))
    with pytest.raises(ConfigError):
        refinement_study(cfg)
    rep = refinement_study(default_config("eq12", grid_sizes=(32, 64),
                                          suite={"kind": "mixed", "count": 3}))
    assert rep.stability_verdict is not None


def test_thm31_t_scan_reported():
    cfg = default_config("thm31", grid_sizes=(32,), suite={"kind": "mixed", "count": 3},
                         weight_suite={"kind": "mixed_weights", "count": 2})
    rep = run_inequality(cfg)
    extra = rep.grids[0].extra
    assert set(extra["t_scan"]) == {"0.55", "0.65", "0.75", "0.85"}
    assert float(extra["best_t"]) in (0.55, 0.65, 0.75, 0.85)
    assert rep.grids[0].witness["t"] == float(extra["best_t"])


def test_thm42_metadata_hypotheses():
    cfg = default_config("thm42", grid_sizes=(32,), suite={"kind": "compact", "count": 2})
    rep = run_inequality(cfg)
    extra = rep.grids[0].extra
    assert set(extra["bump_memberships"]) == {
        "conjA_in_B_(q/r)'", "conjA_in_B_alpha2_q'", "conjB_in_B_alpha1r_p/r"}
    assert all(not m["divergent"] for m in extra["bump_memberships"].values())
    assert not extra["lambda_tail_divergent"]
    assert rep.passed


def test_thm53_per_operator_constants():
    cfg = default_config("thm53", grid_sizes=(16, 32), suite={"kind": "mixed", "count": 3})
    rep = run_inequality(cfg)
    per_op = rep.grids[-1].extra["per_operator"]
    assert set(per_op) == {"maximal", "riesz"}
    assert all(math.isfinite(v) for v in per_op.values())


def test_prop51_variant_constants_reported():
    cfg = default_config("prop51", grid_sizes=(32,), suite={"kind": "mixed", "count": 3},
                         cube_samples=4)
    rep = run_inequality(cfg)
    extra = rep.grids[0].extra
    assert "c_emp_variant_i" in extra and extra["c_emp_variant_i"] > 0
    assert rep.grids[0].c_emp > 0


def test_sanitize_handles_non_finite():
    out = sanitize({"a": math.inf, "b": [math.nan, 1.0], "c": np.float64(2.0)})
    assert out == {"a": "inf", "b": ["nan", 1.0], "c": 2.0}


def test_eq33_gate_counts_reported():
    cfg = default_config("eq33", grid_sizes=(32,), suite={"kind": "compact", "count": 3},
                         weight_suite={"kind": "mixed_weights", "count": 2})
    rep = run_inequality(cfg)
    assert "gated_functions" in rep.grids[0].extra


def test_lem41_hormander_lambda_source():
    cfg = default_config("lem41", grid_sizes=(32,), suite={"kind": "compact", "count": 2},
                         cube_samples=3, lambda_source="hormander",
                         gauge_a={"family": "linear", "r": 1.0})
    rep = run_inequality(cfg)
    rec = rep.grids[0]
    assert rec.extra["lambda"]["source"] == "from_hormander"
    assert math.isfinite(rec.c_emp)
    assert rec.extra["plugin_over_exact_sharp"] >= 1.0


def test_prop51_sensitivity_reported():
    cfg = default_config("prop51", grid_sizes=(32,), suite={"kind": "mixed", "count": 2},
                         cube_samples=3)
    rep = run_inequality(cfg)
    sens = rep.grids[0].extra["cn_dn_sensitivity"]
    assert sens["scale"] == 1.5 and math.isfinite(sens["c_emp_variant_ii"])


def test_thm21_runs_in_2d():
    cfg = default_config("thm21", dim=2, grid_sizes=(16,),
                         suite={"kind": "mixed", "count": 2})
    rep = run_inequality(cfg)
    assert math.isfinite(rep.grids[0].c_emp) and rep.grids[0].c_emp > 0


def test_refinement_verdict_fails_on_growth(monkeypatch):
    from hartool.harness import inequalities as ineq

    def fake_runner(cfg, n):
        col = ineq.RatioCollector()
        col.add_scalar(float(n), 1.0, {"function": 0})  # c_emp grows like N
        return col, {}, None

    monkeypatch.setitem(ineq._RUNNERS, "eq12", fake_runner)
    rep = run_inequality(default_config("eq12", grid_sizes=(32, 128)))
    assert rep.stability_ratio == pytest.approx(4.0)
    assert rep.stability_verdict is False and rep.passed is False
    assert [g.c_emp for g in rep.grids] == [32.0, 128.0]  # the growth trace


def test_thm53_gamma_zero_needs_maximal_only():
    with pytest.raises(ConfigError, match="gamma > 0"):
        default_config("thm53", gamma=0.0)
    cfg = default_config("thm53", gamma=0.0, operators=("maximal",),
                         grid_sizes=(16, 32), suite={"kind": "mixed", "count": 2})
    rep = run_inequality(cfg)
    assert math.isfinite(rep.grids[-1].c_emp)


def test_eq19_gauge_exponent_guard():
    with pytest.raises(ConfigError, match="q > 1"):
        default_config("eq19", q=1.0)


def test_thm21_single_indicator_example():
    cfg = default_config("thm21", grid_sizes=(128, 256), gamma=0.5, s=0.5, r=1.0,
                         suite={"kind": "indicator", "count": 1})
    rep = run_inequality(cfg)
    assert all(math.isfinite(g.c_emp) and g.c_emp > 0 for g in rep.grids)
    assert rep.stability_ratio <= 2.0


def test_tabulated_morrey_weight_through_config():
    cfg = default_config(
        "thm52", grid_sizes=(32, 64), gamma=0.25, p=2.0,
        morrey_phi={"family": "tabulated",
                    "t": [0.01, 0.1, 1.0], "values": [3.0, 2.0, 1.0]},
        morrey_psi={"family": "power_law", "sigma": -0.15},
        suite={"kind": "mixed", "count": 3})
    rep = run_inequality(cfg)
    assert all(math.isfinite(g.c_emp) for g in rep.grids)
