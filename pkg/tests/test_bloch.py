import io

import numpy as np
import pytest
from scipy.integrate import quad

from fourierpulse.bloch import (
    EnsembleGrid, SimOptions, StateProfile, apply_event, composed_rotation, evaluate_program, l2_error,
    program_rotation, simulate_program,
)
from fourierpulse.notation import parse_program
from fourierpulse.pulses import Block, PulseProgram, RfSegment, ZShift

HALF_Y = PulseProgram((Block((RfSegment(90.0, 90.0),)),))


def test_y_pulse_profile_matches_closed_form():
    grid = EnsembleGrid(0.5, 1.5, 201)
    prof = simulate_program(HALF_Y, grid)
    eps = grid.epsilons
    np.testing.assert_allclose(prof.states[:, 0], np.sin(eps * np.pi / 2), atol=1e-14)
    np.testing.assert_allclose(prof.states[:, 2], np.cos(eps * np.pi / 2), atol=1e-14)
    exact = np.sqrt(quad(lambda e: 2 - 2 * np.sin(e * np.pi / 2), 0.5, 1.5)[0])
    assert l2_error(prof).l2_error == pytest.approx(exact, rel=1e-6)


def test_phase_zero_pulse_rotates_about_x():
    out = apply_event([0, 0, 1], RfSegment(90.0, 0.0), 1.0)
    np.testing.assert_allclose(out, [0, -1, 0], atol=1e-15)


def test_zshift_is_not_scaled_by_eps():
    out = apply_event([1, 0, 0], ZShift(90.0), 0.3)
    np.testing.assert_allclose(out, [0, 1, 0], atol=1e-15)


def test_offset_adds_z_component():
    seg = RfSegment(180.0, 0.0)
    on = apply_event([0, 0, 1], seg, 1.0, 0.0)
    off = apply_event([0, 0, 1], seg, 1.0, 0.5)
    np.testing.assert_allclose(on, [0, 0, -1], atol=1e-15)
    assert np.linalg.norm(off - on) > 0.1
    assert np.linalg.norm(off) == pytest.approx(1.0)


def test_program_rotation_agrees_with_state_simulation():
    prog = parse_program("[(90.0)_0(180.0)_{175.6}(90.0)_0]^{×12}[(270.0)_0(540.0)_{175.8}(270.0)_0]^{×2}")
    grid = EnsembleGrid(0.5, 1.5, 11)
    rots = program_rotation(prog, grid.epsilons)
    states = simulate_program(prog, grid).states
    np.testing.assert_allclose(np.einsum("nij,j->ni", rots, [0, 0, 1]), states, atol=1e-12)
    np.testing.assert_allclose(composed_rotation(prog, 1.1), program_rotation(prog, 1.1), atol=1e-12)


def test_norm_preserved_over_long_programs():
    rng = np.random.default_rng(3)
    segs = tuple(RfSegment(f, p) for f, p in zip(rng.uniform(-720, 720, 1000), rng.uniform(0, 360, 1000)))
    prog = PulseProgram((Block(segs, 10),))
    prof = simulate_program(prog, EnsembleGrid(0.5, 1.5, 21))
    np.testing.assert_allclose(np.linalg.norm(prof.states, axis=1), 1.0, atol=1e-9)


def test_grid_and_profile_validation():
    with pytest.raises(ValueError):
        EnsembleGrid(0.5, 1.5, 4)
    with pytest.raises(ValueError):
        EnsembleGrid(1.5, 0.5, 5)
    with pytest.raises(ValueError):
        l2_error(StateProfile(np.linspace(0, 1, 4), np.zeros((4, 3))))
    with pytest.raises(ValueError):
        l2_error(StateProfile(np.array([0.0, 0.1, 1.0]), np.zeros((3, 3))))
    with pytest.raises(ValueError):
        SimOptions(substeps=0)


def test_callable_target_and_flip_fields():
    grid = EnsembleGrid(0.5, 1.5, 101)
    target = lambda e: np.array([np.sin(e * np.pi / 2), 0.0, np.cos(e * np.pi / 2)])  # noqa: E731
    rep = evaluate_program(HALF_Y, grid, target)
    assert rep.l2_error < 1e-12
    assert rep.flip_rf_sum == pytest.approx(np.pi / 2)


def test_csv_output():
    grid = EnsembleGrid(0.5, 1.5, 3)
    prof = simulate_program(HALF_Y, grid)
    buf = io.StringIO()
    prof.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "epsilon,x,y,z" and len(lines) == 4
    buf = io.StringIO()
    l2_error(prof).to_csv(buf)
    assert buf.getvalue().startswith("epsilon,residual\n")
