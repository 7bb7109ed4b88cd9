import math
import warnings

import numpy as np
import pytest

from fourierpulse.modulation import (
    ModulationSpec, SampledShape, arbitrary_coefficient, arbitrary_first_order, geodesic_gap, linear_coefficient,
    linear_first_order, load_shape_csv, robust_composite, schedule, signed_y_angle, simulate_modulated,
)
from fourierpulse.so3 import geodesic_distance, is_rotation


def sampled(f, B, count=201, A=1.0):
    t = np.linspace(0, math.pi / A, count)
    return ModulationSpec(A, B, SampledShape(t, f(t)))


def test_linear_coefficient_special_points():
    spec = ModulationSpec(1.0, 0.01)
    assert linear_coefficient(spec, 1.0) == pytest.approx(0.08)
    assert linear_coefficient(spec, 2.0) == pytest.approx(0.0, abs=1e-17)
    d = 1e-3
    assert linear_coefficient(spec, 1 + d) == pytest.approx(0.08 * (1 - d), rel=1e-5)
    with pytest.raises(ValueError):
        linear_first_order(spec, 0.0)


def test_zero_rate_gives_identity():
    np.testing.assert_allclose(simulate_modulated(ModulationSpec(1.0, 0.0), 1.3), np.eye(3), atol=1e-14)


def test_simulation_is_close_to_first_order():
    spec = ModulationSpec(1.0, 0.01)
    sim = simulate_modulated(spec, 1.2)
    assert is_rotation(sim)
    assert geodesic_distance(sim, linear_first_order(spec, 1.2)) < 5e-4
    assert signed_y_angle(sim) == pytest.approx(linear_coefficient(spec, 1.2), rel=1e-2)


def test_frame_closure():
    for spec in (ModulationSpec(1.0, 0.01), sampled(lambda t: -0.01 * np.sin(t), 0.01)):
        sch = schedule(spec, 50)
        assert np.sum(sch.x_signs * sch.durations) == pytest.approx(0.0, abs=1e-14)
        assert np.sum(sch.phase_rates.mean(axis=1) * sch.durations) == pytest.approx(0.0, abs=1e-14)


def test_schedule_first_half_is_palindromic():
    sch = schedule(sampled(lambda t: -0.01 * t / math.pi, 0.01), 40)
    first = sch.phase_rates[:80]
    np.testing.assert_allclose(first[::-1, ::-1], first, atol=1e-15)
    np.testing.assert_allclose(sch.phase_rates[80:], -first, atol=1e-15)


def test_constant_sampled_shape_equals_linear():
    lin = ModulationSpec(1.0, 0.01)
    samp = sampled(lambda t: -0.01 * np.ones_like(t), 0.01)
    np.testing.assert_allclose(simulate_modulated(samp, 1.2), simulate_modulated(lin, 1.2), atol=1e-12)
    assert arbitrary_coefficient(samp, 0.8) == pytest.approx(linear_coefficient(lin, 0.8), rel=1e-8)


def test_arbitrary_coefficient_closed_form():
    B, A, e = 0.01, 1.0, 1.2
    spec = sampled(lambda t: -B * np.sin(A * t), B, count=401)
    expected = 4 * B * (math.sin((1 - e) * math.pi) / (2 * A * (1 - e)) - math.sin((1 + e) * math.pi) / (2 * A * (1 + e)))
    assert arbitrary_coefficient(spec, e) == pytest.approx(expected, rel=1e-8)
    zero = sampled(lambda t: 0 * t, 0.01)
    np.testing.assert_allclose(arbitrary_first_order(zero, 1.1), np.eye(3))


def test_arbitrary_needs_three_samples():
    spec = ModulationSpec(1.0, 0.01, SampledShape(np.array([0.0, math.pi]), np.array([0.0, 0.0])))
    with pytest.raises(ValueError):
        arbitrary_coefficient(spec, 1.0)


def test_substep_refinement_agrees():
    spec = sampled(lambda t: -0.01 * np.sin(t), 0.01)
    np.testing.assert_allclose(simulate_modulated(spec, 1.2, 1000), simulate_modulated(spec, 1.2, 2000), atol=1e-8)


def test_quadratic_convergence_away_from_unit_eps():
    for e in (0.6, 1.4):
        a, b = (geodesic_gap(ModulationSpec(1.0, B), e) for B in (0.01, 0.005))
        assert 3.4 <= a / b <= 4.6


def test_robust_composite():
    prog, rep = robust_composite(ModulationSpec(1.0, 0.01))
    assert rep.angle_at_one == pytest.approx(0.16, rel=1e-3)
    assert abs(rep.derivative_at_one) <= 1e-3 * rep.angle_at_one
    assert len(prog.blocks) == 2 and prog.blocks[1].events[0].phase_deg == 90.0
    _, zero = robust_composite(ModulationSpec(1.0, 0.0))
    assert zero.angle_at_one == 0.0 and zero.derivative_at_one == 0.0
    with pytest.raises(ValueError):
        robust_composite(sampled(lambda t: 0 * t, 0.01))


def test_spec_validation_and_warning():
    with pytest.raises(ValueError):
        ModulationSpec(0.0, 0.01)
    with pytest.raises(ValueError):
        ModulationSpec(1.0, -0.1)
    with pytest.raises(ValueError):
        sampled(lambda t: 0.02 + 0 * t, 0.01)
    with pytest.raises(ValueError):
        ModulationSpec(1.0, 0.01, SampledShape(np.linspace(0, 1, 5), np.zeros(5)))
    with pytest.raises(ValueError):
        SampledShape(np.array([0.0, 1.0, 3.0]), np.zeros(3))
    with pytest.warns(UserWarning):
        ModulationSpec(1.0, 0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ModulationSpec(1.0, 0.1)


def test_load_shape_csv(tmp_path):
    t = np.linspace(0, math.pi, 11)
    path = tmp_path / "shape.csv"
    path.write_text("t,f\n" + "".join(f"{float(a)!r},{-0.01 * math.sin(a)!r}\n" for a in t))
    spec = load_shape_csv(path, 1.0)
    assert spec.rate_B == pytest.approx(0.01)
    bad = tmp_path / "bad.csv"
    bad.write_text("time,value\n0,0\n")
    with pytest.raises(ValueError):
        load_shape_csv(bad, 1.0)
