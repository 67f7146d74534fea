import math

import numpy as np
import pytest

from hartool import (BorderlineLogModulus, ConjugateGauge, Cube, ExpPowerGauge,
                     Grid, HolderModulus, LinearGauge, LogModulus, PowerGauge,
                     PowerLawWeight, PowerLogGauge, SampledFunction,
                     ScaledPowerGauge, TabulatedWeight, bump_norm, conjugate,
                     dini_integral, evaluate, inverse, luxemburg_mean_norm,
                     luxemburg_raw_norm, modulus_from_json, young_from_json)

ALL_GAUGES = [
    PowerGauge(2.0),
    PowerGauge(1.5),
    ScaledPowerGauge(2.0, 0.5),
    PowerLogGauge(2.0, 1.0),
    ExpPowerGauge(1.0),
    LinearGauge(1.0),
    LinearGauge(2.5),
]


def test_eval_examples():
    assert evaluate(PowerGauge(2.0), 3.0) == 9.0
    assert evaluate(LinearGauge(1.0), 5.0) == 5.0
    assert evaluate(PowerLogGauge(2.0, 1.0), 0.0) == 0.0
    with pytest.raises(ValueError):
        evaluate(PowerGauge(2.0), -1.0)


def test_inverse_examples():
    assert inverse(PowerGauge(2.0), 9.0) == pytest.approx(3.0, abs=1e-11)
    assert inverse(PowerGauge(3.0), 8.0) == pytest.approx(2.0, abs=1e-11)
    a = PowerLogGauge(2.0, 1.0)
    u = evaluate(a, 1.7)
    assert inverse(a, u) == pytest.approx(1.7, abs=1e-10)
    assert inverse(a, 0.0) == 0.0


@pytest.mark.parametrize("gauge", ALL_GAUGES, ids=lambda g: g.family + str(g.to_json()))
def test_inverse_round_trip(gauge):
    for t in (1e-3, 0.1, 1.0, 7.3, 120.0, 1e6):
        u = float(gauge.value(t))
        if not math.isfinite(u):
            continue
        assert inverse(gauge, u) == pytest.approx(t, rel=1e-9)


def test_inverse_strictly_increasing():
    a = PowerLogGauge(2.0, 1.0)
    us = np.linspace(0.1, 50, 40)
    ts = [inverse(a, u) for u in us]
    assert all(t2 > t1 for t1, t2 in zip(ts, ts[1:]))


def test_conjugate_examples():
    assert conjugate(ScaledPowerGauge(2.0, 0.5), 3.0) == pytest.approx(4.5, abs=1e-8)
    assert conjugate(PowerGauge(2.0), 0.0) == 0.0
    expected = 2.0 ** 1.5 * (2.0 / 3.0)  # closed form s^{p'}/p', p' = 3/2
    assert conjugate(ScaledPowerGauge(3.0, 1.0 / 3.0), 2.0) == pytest.approx(expected, rel=1e-6)
    assert conjugate(LinearGauge(1.0), 0.7) == 0.0
    assert conjugate(LinearGauge(1.0), 1.5) == math.inf


@pytest.mark.parametrize("gauge", [PowerGauge(2.0), ScaledPowerGauge(3.0, 0.25),
                                   PowerLogGauge(2.0, 1.0), ExpPowerGauge(1.0)],
                         ids=lambda g: g.family)
def test_youngs_inequality_on_log_grid(gauge):
    ts = np.logspace(-3, 3, 100)
    ss = np.logspace(-3, 3, 100)
    conj_vals = gauge.conjugate_values(ss)
    a_vals = np.asarray(gauge.value(ts), dtype=float)
    prod = ss[:, None] * ts[None, :]
    bound = conj_vals[:, None] + a_vals[None, :]
    scale = np.maximum(1.0, np.abs(bound))
    finite = np.isfinite(bound)
    assert np.all(prod[finite] <= bound[finite] + 1e-9 * scale[finite])


def test_conjugate_table_matches_ternary():
    conj = ConjugateGauge(PowerGauge(2.5))
    s = np.logspace(-3, 3, 50)
    exact = conj.base.conjugate_values(s)
    table = conj.value(np.tile(s, (400, 1)))[0]  # 2D input routes via the table
    assert np.allclose(table, exact, rtol=1e-5)


def test_luxemburg_examples():
    g = Grid(1, 8)
    q = Cube(g, (0,), 8)
    f3 = SampledFunction.constant(g, 3.0)
    assert luxemburg_mean_norm(f3, q, PowerGauge(2.0)) == pytest.approx(3.0, rel=1e-11)
    half = SampledFunction(g, [1, 1, 1, 1, 0, 0, 0, 0])
    assert luxemburg_mean_norm(half, q, PowerGauge(2.0)) == pytest.approx(
        math.sqrt(0.5), abs=1e-10)
    zero = SampledFunction.constant(g, 0.0)
    assert luxemburg_mean_norm(zero, q, PowerGauge(2.0)) == 0.0
    assert luxemburg_raw_norm(zero, q, PowerGauge(2.0)) == 0.0
    # raw norm of 1 over |Q| = 0.25 with p = 2 is 0.5
    g4 = Grid(1, 4)
    one = SampledFunction.constant(g4, 1.0)
    assert luxemburg_raw_norm(one, Cube(g4, (0,), 1), PowerGauge(2.0)) == pytest.approx(
        0.5, rel=1e-11)


def test_luxemburg_power_closed_forms_random():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.choice([8, 16, 32]))
        g = Grid(1, n, float(rng.uniform(0.5, 3.0)))
        f = SampledFunction(g, rng.uniform(-2, 2, n))
        m = int(rng.integers(1, n + 1))
        q = Cube(g, (int(rng.integers(0, n - m + 1)),), m)
        p = float(rng.choice([1.5, 2.0, 3.0]))
        sub = np.abs(f.values[q.slices])
        mean_ref = float(np.mean(sub ** p) ** (1 / p))
        raw_ref = float((np.sum(sub ** p) * g.h) ** (1 / p))
        assert luxemburg_mean_norm(f, q, PowerGauge(p)) == pytest.approx(mean_ref, rel=1e-9, abs=1e-12)
        assert luxemburg_raw_norm(f, q, PowerGauge(p)) == pytest.approx(raw_ref, rel=1e-9, abs=1e-12)
        # power-law identity raw = mean * |Q|^{1/p}
        assert luxemburg_raw_norm(f, q, PowerGauge(p)) == pytest.approx(
            luxemburg_mean_norm(f, q, PowerGauge(p)) * q.measure ** (1 / p), rel=1e-9, abs=1e-12)


def test_luxemburg_homogeneity_and_monotonicity():
    rng = np.random.default_rng(12)
    g = Grid(1, 16)
    q = Cube(g, (2,), 9)
    for gauge in (PowerGauge(2.0), PowerLogGauge(2.0, 1.0), ExpPowerGauge(1.0)):
        f = SampledFunction(g, rng.uniform(-1, 1, 16))
        alpha = 3.7
        assert luxemburg_mean_norm(f.scaled(alpha), q, gauge) == pytest.approx(
            alpha * luxemburg_mean_norm(f, q, gauge), rel=1e-10)
        bigger = SampledFunction(g, np.abs(f.values) + rng.uniform(0, 1, 16))
        assert luxemburg_mean_norm(bigger, q, gauge) >= luxemburg_mean_norm(f, q, gauge) - 1e-12
        assert luxemburg_raw_norm(f.scaled(-alpha), q, gauge) == pytest.approx(
            alpha * luxemburg_raw_norm(f, q, gauge), rel=1e-10)


def test_holder_inequality_mean_norms():
    # avg_Q |f| <= 2 ||f||_Phi,Q ||1||_conjPhi,Q with the numeric conjugate
    rng = np.random.default_rng(13)
    g = Grid(1, 32)
    one = SampledFunction.constant(g, 1.0)
    for p in (1.5, 2.0, 3.0):
        phi = PowerGauge(p)
        conj = ConjugateGauge(phi)
        for _ in range(5):
            f = SampledFunction(g, rng.uniform(-3, 3, 32))
            m = int(rng.integers(2, 33))
            q = Cube(g, (int(rng.integers(0, 32 - m + 1)),), m)
            avg = float(np.mean(np.abs(f.values[q.slices])))
            bound = 2.0 * luxemburg_mean_norm(f, q, phi) * luxemburg_mean_norm(one, q, conj)
            assert avg <= bound * (1 + 1e-9)


def test_dini_examples():
    val, div = dini_integral(HolderModulus(1.0), 1.0)
    assert not div and val == pytest.approx(1.0, abs=1e-6)
    val, div = dini_integral(HolderModulus(0.5), 2.0)
    assert not div and val == pytest.approx(2 * math.sqrt(2), abs=1e-5)
    _, div = dini_integral(BorderlineLogModulus(), 1.0)
    assert div
    _, div = dini_integral(LogModulus(0.5), 1.0)
    assert not div
    with pytest.raises(ValueError):
        dini_integral(HolderModulus(1.0), 0.0)


def test_bump_norm_examples():
    val, div = bump_norm(LinearGauge(1.0), 0.0, 2.0)
    assert not div and val == pytest.approx(1.0, abs=1e-4)
    _, div = bump_norm(PowerGauge(2.0), 0.0, 2.0)
    assert div
    for s, expect_in in ((1.5, True), (3.0, False)):
        _, div = bump_norm(PowerGauge(s) if s > 1 else LinearGauge(s), 0.0, 2.0)
        assert div != expect_in
    with pytest.raises(ValueError):
        bump_norm(PowerGauge(2.0), 0.5, 3.0)  # p >= 1/alpha


def test_bump_norm_fractional_index():
    # alpha > 0 shifts the tail exponent: t^s integrand with q = 1/(1/p - alpha)
    val, div = bump_norm(LinearGauge(1.0), 0.25, 2.0)
    assert not div and math.isfinite(val)


def test_modulus_monotone():
    ts = np.linspace(0.01, 0.99, 50)
    for mod in (HolderModulus(0.5), LogModulus(0.7), BorderlineLogModulus()):
        vals = np.asarray(mod.value(ts))
        assert np.all(np.diff(vals) >= -1e-15)
        assert np.all(vals >= 0)


def test_doubling_constants():
    assert PowerGauge(2.0).doubling_constant() == pytest.approx(4.0)
    a = PowerLogGauge(2.0, 1.0)
    bound = a.doubling_constant()
    ts = np.logspace(-3, 6, 200)
    assert np.all(a.value(2 * ts) <= bound * a.value(ts) * (1 + 1e-12))
    assert ExpPowerGauge(1.0).doubling_constant() is None


def test_json_constructors():
    for gauge in ALL_GAUGES:
        back = young_from_json(gauge.to_json())
        assert back == gauge
    conj = ConjugateGauge(PowerGauge(2.0))
    assert young_from_json(conj.to_json()) == conj
    for mod in (HolderModulus(0.5), LogModulus(0.7), BorderlineLogModulus()):
        assert modulus_from_json(mod.to_json()) == mod
    with pytest.raises(ValueError):
        young_from_json({"family": "nope"})


def test_gauge_parameter_validation():
    with pytest.raises(ValueError):
        PowerGauge(1.0)
    with pytest.raises(ValueError):
        LinearGauge(0.5)
    with pytest.raises(ValueError):
        PowerLogGauge(2.0, -3.0)
    with pytest.raises(ValueError):
        HolderModulus(0.0)


def test_morrey_weight_families():
    w = PowerLawWeight(-0.5)
    assert w.value(None, 4.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        PowerLawWeight(0.1)
    tab = TabulatedWeight((0.1, 1.0, 10.0), (3.0, 2.0, 1.0))
    assert tab.value(None, 1.0) == pytest.approx(2.0)
    assert 1.0 < tab.value(None, 3.0) < 2.0
    with pytest.raises(ValueError):
        TabulatedWeight((0.1, 1.0), (1.0, 2.0))  # increasing in t
