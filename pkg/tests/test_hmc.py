import math

import numpy as np
import pytest
from scipy.stats import kstest

from spinbps import (
    Augmentation,
    HmcConfig,
    MrfModel,
    default_travel_time,
    enumerate_moments,
    evolve_harmonic,
    hmc_iterate,
    hmc_run,
    hmc_wall_rule,
    mrf_sample,
    potential,
    wall_hit_time,
)
from tests_support import (
    RecordingSink,
    batch_mean_and_se,
    batch_tables,
    flat_model,
    moment_vector,
)


def hmc_config(**kw):
    kw.setdefault("travel_time", 6.5 * math.pi)
    kw.setdefault("iterations", 100)
    return HmcConfig(**kw)


# ------------------------------------------------------------ harmonic motion


def test_half_period_negates_position():
    y, v = evolve_harmonic([1.0], [0.0], math.pi)
    assert y[0] == pytest.approx(-1.0, abs=1e-12)
    assert v[0] == pytest.approx(0.0, abs=1e-12)


def test_quarter_turn_values():
    y, v = evolve_harmonic([1.0], [0.0], math.pi / 4.0)
    assert y[0] == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert v[0] == pytest.approx(-math.sqrt(0.5), abs=1e-12)


def test_rotation_conserves_per_coordinate_energy():
    rng = np.random.default_rng(30)
    for _ in range(100):
        d = int(rng.integers(1, 6))
        y0 = rng.standard_normal(d)
        v0 = rng.standard_normal(d)
        t = float(rng.uniform(0.0, 20.0))
        y1, v1 = evolve_harmonic(y0, v0, t)
        before = y0 * y0 + v0 * v0
        after = y1 * y1 + v1 * v1
        assert np.max(np.abs(after - before)) <= 1e-12


def test_joint_rotation_equals_per_coordinate_rotation():
    rng = np.random.default_rng(31)
    y0 = rng.standard_normal(6)
    v0 = rng.standard_normal(6)
    t = 2.37
    y1, v1 = evolve_harmonic(y0, v0, t)
    for i in range(6):
        yi, vi = evolve_harmonic([y0[i]], [v0[i]], t)
        assert abs(yi[0] - y1[i]) <= 1e-12
        assert abs(vi[0] - v1[i]) <= 1e-12


# ----------------------------------------------------------------- wall times


def test_wall_hit_time_examples():
    assert wall_hit_time(1.0, 0.0) == pytest.approx(math.pi / 2.0, abs=1e-12)
    assert wall_hit_time(0.0, 1.0) == pytest.approx(math.pi, abs=1e-12)
    assert wall_hit_time(0.0, -1.0) == pytest.approx(math.pi, abs=1e-12)
    assert wall_hit_time(1.0, 1.0) == pytest.approx(0.75 * math.pi, abs=1e-12)


def test_wall_hit_time_rejects_degenerate_coordinate():
    with pytest.raises(ValueError):
        wall_hit_time(0.0, 0.0)


def test_wall_hit_time_lands_on_the_wall():
    rng = np.random.default_rng(32)
    for _ in range(500):
        y = float(rng.standard_normal())
        v = float(rng.standard_normal())
        if y == 0.0 and v == 0.0:
            continue
        t = wall_hit_time(y, v)
        amplitude = math.hypot(y, v)
        assert 0.0 < t <= math.pi + 1e-12
        y_t, _ = evolve_harmonic([y], [v], t)
        assert abs(y_t[0]) <= 1e-9 * amplitude


# ------------------------------------------------------------------ wall rule


def test_wall_rule_crossing_spends_kinetic_energy():
    crossed, v_new = hmc_wall_rule(2.0, 1.5)
    assert crossed
    assert v_new == pytest.approx(1.0, abs=1e-15)


def test_wall_rule_reflects_when_energy_is_short():
    crossed, v_new = hmc_wall_rule(1.0, 1.0)
    assert not crossed
    assert v_new == -1.0


def test_wall_rule_downhill_always_crosses_and_speeds_up():
    rng = np.random.default_rng(33)
    for _ in range(100):
        v = float(rng.standard_normal())
        if v == 0.0:
            continue
        jump = -abs(float(rng.standard_normal()))
        crossed, v_new = hmc_wall_rule(v, jump)
        assert crossed
        assert abs(v_new) >= abs(v)
        assert math.copysign(1.0, v_new) == math.copysign(1.0, v)


def test_wall_rule_conserves_energy():
    rng = np.random.default_rng(34)
    for _ in range(200):
        v = float(rng.standard_normal()) * 2.0
        jump = float(rng.standard_normal())
        crossed, v_new = hmc_wall_rule(v, jump)
        # potential climbs by jump only on a crossing
        du = jump if crossed else 0.0
        assert 0.5 * v * v == pytest.approx(0.5 * v_new * v_new + du, abs=1e-12)


# ------------------------------------------------------------------ iteration


def test_flat_model_endpoints_are_standard_normal():
    # with no potential jumps every wall is crossed at full speed, so the
    # endpoint is an unbroken harmonic rotation of a fresh normal draw
    m = flat_model(2)
    config = hmc_config(iterations=1)
    rng = np.random.default_rng(35)
    n = 10_000
    y = np.array([0.3, -0.7])
    s = np.array([1.0, -1.0])
    endpoints = np.empty((n, 2))
    for k in range(n):
        y, s = hmc_iterate(m, y, s, config, rng)
        endpoints[k] = y
    critical = 1.628 / math.sqrt(n)
    for i in range(2):
        statistic = kstest(endpoints[:, i], "norm").statistic
        assert statistic < critical


def test_tiny_travel_time_barely_moves_the_state():
    m = mrf_sample(4, 0.5, 0.5, seed=36)
    y = np.array([0.5, -1.0, 0.8, -0.3])
    s = np.sign(y)
    config = hmc_config(travel_time=1e-8)
    y_new, s_new = hmc_iterate(m, y, s, config, np.random.default_rng(37))
    assert np.array_equal(s_new, s)
    assert float(np.linalg.norm(y_new - y)) <= 1e-6


def test_two_state_long_run_fraction_matches_enumeration():
    m = MrfModel(dim=1, couplings=np.zeros((1, 1)), fields=np.array([0.4]))
    exact = enumerate_moments(m).first[0]
    sink = RecordingSink()
    hmc_run(m, hmc_config(iterations=20_000), np.random.default_rng(38), sink=sink)
    estimate, se = batch_mean_and_se(batch_tables(sink, 1, 10), 1)
    assert abs(estimate[0] - exact) <= 3.0 * se[0]


# ----------------------------------------------------------------- full runs


def test_flat_run_is_unbiased():
    m = flat_model(3)
    sink = RecordingSink()
    hmc_run(m, hmc_config(iterations=10_000), np.random.default_rng(50), sink=sink)
    estimate, se = batch_mean_and_se(batch_tables(sink, 3, 10), 3)
    assert np.all(np.abs(estimate) <= 3.0 * np.maximum(se, 1e-12))


def test_run_matches_enumeration_within_batch_errors():
    m = mrf_sample(3, 0.5, 0.5, seed=40)
    exact = moment_vector(enumerate_moments(m), 3)
    sink = RecordingSink()
    hmc_run(m, hmc_config(iterations=60_000), np.random.default_rng(41), sink=sink)
    estimate, se = batch_mean_and_se(batch_tables(sink, 3, 10), 3)
    assert np.all(np.abs(estimate - exact) <= 3.0 * se)


def test_run_is_deterministic():
    m = mrf_sample(3, 0.7, 0.4, seed=42)
    config = hmc_config(iterations=2000)
    a = hmc_run(m, config, np.random.default_rng(43))
    b = hmc_run(m, config, np.random.default_rng(43))
    assert np.array_equal(a.moments.first, b.moments.first)
    assert np.array_equal(a.moments.second, b.moments.second)
    assert a.wall_events == b.wall_events
    assert a.wall_crossings == b.wall_crossings


def test_energy_is_conserved_through_wall_events():
    # strong couplings so legs regularly reflect as well as cross
    from spinbps.hmc import _sweep

    m = mrf_sample(4, 1.5, 0.8, seed=44)
    rng = np.random.default_rng(45)
    s = [float(x) for x in rng.integers(0, 2, size=4) * 2 - 1]
    y = [abs(float(x)) * s[i] for i, x in enumerate(rng.standard_normal(4))]
    walls = 0
    for _ in range(200):
        v = [float(x) for x in rng.standard_normal(4)]
        before = 0.5 * sum(x * x for x in v) + potential(Augmentation.GAUSSIAN, m, y, s)
        w, _ = _sweep(y, v, s, 4, 6.5 * math.pi, m)
        walls += w
        after = 0.5 * sum(x * x for x in v) + potential(Augmentation.GAUSSIAN, m, y, s)
        assert abs(after - before) <= 1e-9 * max(1.0, abs(before))
    assert walls > 0


def test_wall_bookkeeping():
    m = mrf_sample(3, 0.5, 0.5, seed=46)
    res = hmc_run(m, hmc_config(iterations=500), np.random.default_rng(47))
    assert res.iterations == 500
    assert 0 <= res.wall_crossings <= res.wall_events
    assert res.wall_events > 0


def test_first_moments_only_run():
    m = mrf_sample(3, 0.5, 0.5, seed=48)
    res = hmc_run(
        m, hmc_config(iterations=500, include_second_moments=False), np.random.default_rng(49)
    )
    assert res.moments.second is None


def test_default_travel_time_switches_at_high_dimension():
    assert default_travel_time(3) == pytest.approx(6.5 * math.pi)
    assert default_travel_time(20) == pytest.approx(6.5 * math.pi)
    assert default_travel_time(21) == pytest.approx(0.5 * math.pi)
    assert default_travel_time(100) == pytest.approx(0.5 * math.pi)


def test_config_validation():
    with pytest.raises(ValueError):
        HmcConfig(travel_time=0.0, iterations=10)
    with pytest.raises(ValueError):
        HmcConfig(travel_time=math.inf, iterations=10)
    with pytest.raises(ValueError):
        HmcConfig(travel_time=1.0, iterations=0)
    with pytest.raises(ValueError):
        HmcConfig(travel_time=1.0, iterations=10, burn_in_fraction=-0.1)
