import math

import numpy as np
import pytest

from hartool import (ConditionFParams, CubeFamily, Grid, LinearGauge,
                     PowerGauge, SampledFunction, ainfty_constant, ap_constant,
                     bump_condition, condition_f_constant, fractional_maximal)
from hartool.harness.oracles import exhaustive_subset_ratio
from hartool.weights import subset_ratio_exact


def test_condition_f_unit_weights_four_cells():
    g = Grid(1, 4)
    one = SampledFunction.constant(g, 1.0)
    params = ConditionFParams(alpha=0.25, beta=1.0)
    # alpha = 1/4 admits only k = 1 on the full 4-cell cube
    c, wit = condition_f_constant(one, one, params, CubeFamily(g, "all"))
    assert c == pytest.approx(4.0 / 3.0)
    assert wit.ratio == pytest.approx(1.0 / 3.0)
    assert wit.cube.side_cells == 4 and len(wit.subset) == 1


def test_condition_f_zero_w():
    g = Grid(1, 8)
    zero = SampledFunction.constant(g, 0.0)
    one = SampledFunction.constant(g, 1.0)
    c, wit = condition_f_constant(zero, one, ConditionFParams(0.5, 1.0),
                                  CubeFamily(g, "dyadic"))
    assert c == 0.0 and wit is None


def test_condition_f_unit_weight_exact_bound():
    # for w = v = 1 and beta = 1 the optimum is n/(n-k): c_emp <= 1/(1-alpha)
    g = Grid(1, 16)
    one = SampledFunction.constant(g, 1.0)
    alpha = 0.5
    c, wit = condition_f_constant(one, one, ConditionFParams(alpha, 1.0),
                                  CubeFamily(g, "dyadic"))
    assert c <= 1.0 / (1.0 - alpha) + 1e-12
    n, k = wit.cube.ncells, len(wit.subset)
    assert c == pytest.approx(n / (n - k))


def test_parametric_solver_equals_exhaustive():
    rng = np.random.default_rng(20)
    for _ in range(25):
        ncells = int(rng.integers(2, 17))
        wv = rng.uniform(0, 2, ncells)
        vv = rng.uniform(0.05, 2, ncells)
        k = int(rng.integers(1, ncells))
        lam, _ = subset_ratio_exact(wv, vv, k)
        ref = exhaustive_subset_ratio(wv, vv, k)
        assert lam == pytest.approx(ref, rel=1e-12, abs=1e-15)


def test_condition_f_infinite_sentinel():
    g = Grid(1, 2)
    w = SampledFunction(g, [1.0, 0.0])
    v = SampledFunction(g, [0.5, 0.0])  # complement of the best E carries no v-mass
    c, wit = condition_f_constant(w, v, ConditionFParams(0.5, 1.0),
                                  CubeFamily(g, "all", max_side=2))
    assert math.isinf(c)
    assert wit is not None and math.isinf(wit.required_c)


def test_condition_f_maximal_pair_finite_and_stable():
    rng = np.random.default_rng(21)
    params = ConditionFParams(0.5, 1.0)
    consts = []
    for n in (16, 32):
        g = Grid(1, n)
        x = g.cell_centers()[:, 0]
        w = SampledFunction(g, np.exp(np.sin(2 * np.pi * x) + 0.5 * np.cos(6 * np.pi * x)))
        mrw = fractional_maximal(w, 0.0, LinearGauge(1.5), CubeFamily(g, "all"))
        c, _ = condition_f_constant(w, mrw, params, CubeFamily(g, "dyadic"))
        assert math.isfinite(c)
        consts.append(c)
    assert consts[1] <= 2.0 * consts[0]


def test_ap_constant_examples():
    g = Grid(1, 8)
    fam = CubeFamily(g, "all")
    one = SampledFunction.constant(g, 1.0)
    for p in (1.5, 2.0, 3.0):
        assert ap_constant(one, p, fam) == pytest.approx(1.0)
    g2 = Grid(1, 2)
    M = 5.0
    w = SampledFunction(g2, [1.0, M])
    got = ap_constant(w, 2.0, CubeFamily(g2, "all"))
    assert got == pytest.approx((1 + M) / 2 * (1 + 1 / M) / 2)
    with pytest.raises(ValueError):
        ap_constant(SampledFunction(g2, [1.0, 0.0]), 2.0, CubeFamily(g2, "all"))


def test_ap_constant_refinement_trend():
    # |x - 1/2|^a: inside the A_2 range at a = 0.5, outside at a = 1.5
    def weight(n, a):
        g = Grid(1, n)
        x = g.cell_centers()[:, 0]
        return g, SampledFunction(g, np.abs(x - 0.5) ** a)

    stable, growing = [], []
    for n in (64, 256):
        g, w = weight(n, 0.5)
        stable.append(ap_constant(w, 2.0, CubeFamily(g, "all")))
        g, w = weight(n, 1.5)
        growing.append(ap_constant(w, 2.0, CubeFamily(g, "all")))
    assert stable[1] <= 2.0 * stable[0]
    assert growing[1] >= 1.5 * growing[0]


def test_ainfty_examples():
    g = Grid(1, 8)
    fam = CubeFamily(g, "all")
    assert ainfty_constant(SampledFunction.constant(g, 1.0), fam) == pytest.approx(1.0)
    assert ainfty_constant(SampledFunction.constant(g, 5.5), fam) == pytest.approx(1.0)
    g2 = Grid(1, 2)
    w = SampledFunction(g2, [1.0, math.e ** 2])
    got = ainfty_constant(w, CubeFamily(g2, "all"))
    assert got == pytest.approx((1 + math.e ** 2) / 2 * math.exp(-1.0))


def test_bump_condition_unit_weights():
    g = Grid(1, 16, 1.0)
    fam = CubeFamily(g, "all")
    one = SampledFunction.constant(g, 1.0)
    p, q = 2.0, 4.0
    gamma = 1.0 / p - 1.0 / q  # exponent r(gamma - alpha) = 0
    got = bump_condition(one, one, LinearGauge(1.0), LinearGauge(1.0),
                         p, q, 1.0, gamma, fam)
    assert got == pytest.approx(1.0, rel=1e-12)
    zero = SampledFunction.constant(g, 0.0)
    assert bump_condition(zero, one, LinearGauge(1.0), LinearGauge(1.0),
                          p, q, 1.0, gamma, fam) == 0.0


def test_bump_condition_monotone():
    rng = np.random.default_rng(22)
    g = Grid(1, 16)
    fam = CubeFamily(g, "dyadic")
    w = SampledFunction(g, rng.uniform(0.5, 1.5, 16))
    v = SampledFunction(g, rng.uniform(0.5, 1.5, 16))
    base = bump_condition(w, v, PowerGauge(2.0), PowerGauge(2.0), 2.0, 4.0, 1.0, 0.1, fam)
    w_up = SampledFunction(g, w.values + 0.5)
    v_dn = SampledFunction(g, v.values * 0.5)
    assert bump_condition(w_up, v, PowerGauge(2.0), PowerGauge(2.0),
                          2.0, 4.0, 1.0, 0.1, fam) >= base - 1e-12
    assert bump_condition(w, v_dn, PowerGauge(2.0), PowerGauge(2.0),
                          2.0, 4.0, 1.0, 0.1, fam) >= base - 1e-12


def test_bump_condition_power_weight_stable():
    consts = []
    for n in (32, 64):
        g = Grid(1, n)
        x = g.cell_centers()[:, 0]
        w = SampledFunction(g, np.abs(x - 0.4) ** 0.2)
        consts.append(bump_condition(w, w, PowerGauge(2.0), PowerGauge(2.0),
                                     2.0, 4.0, 1.0, 0.1, CubeFamily(g, "all")))
    assert math.isfinite(consts[-1])
    assert consts[1] <= 2.0 * consts[0]


def test_bump_condition_validation():
    g = Grid(1, 4)
    one = SampledFunction.constant(g, 1.0)
    zero = SampledFunction.constant(g, 0.0)
    fam = CubeFamily(g, "all")
    with pytest.raises(ValueError):
        bump_condition(one, zero, LinearGauge(1.0), LinearGauge(1.0), 2.0, 4.0, 1.0, 0.1, fam)
    with pytest.raises(ValueError):
        bump_condition(one, one, LinearGauge(1.0), LinearGauge(1.0), 4.0, 2.0, 1.0, 0.1, fam)


def test_condition_f_params_validation():
    with pytest.raises(ValueError):
        ConditionFParams(alpha=1.0, beta=1.0)
    with pytest.raises(ValueError):
        ConditionFParams(alpha=0.5, beta=0.0)
