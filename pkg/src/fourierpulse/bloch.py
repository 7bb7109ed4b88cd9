"""Ensemble simulation of pulse programs and the L2 error metric.

Every member of the ensemble starts at ``(0, 0, 1)`` and experiences the
same program with its RF flips scaled by its own eps. Each event is a
single exact rotation, so no time stepping is involved. Time is measured in
radians of nominal flip (the nominal RF amplitude is one), which fixes the
units of the optional Larmor offset ``offset_omega``.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import simpson

from .pulses import PulseProgram, ZShift, total_flip_angle
from .so3 import compose, rotvec_exp

Z_AXIS = np.array([0.0, 0.0, 1.0])
X_AXIS = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class EnsembleGrid:
    """Uniform grid of dispersion values with an odd number of points."""

    eps_min: float = 0.5
    eps_max: float = 1.5
    count: int = 201

    def __post_init__(self):
        if not self.eps_min < self.eps_max:
            raise ValueError(f"need eps_min < eps_max, got {self.eps_min} >= {self.eps_max}")
        if self.count < 3 or self.count % 2 == 0:
            raise ValueError(f"grid count must be odd and at least 3 for Simpson weights, got {self.count}")

    @classmethod
    def around_one(cls, delta: float = 0.5, count: int = 201) -> "EnsembleGrid":
        return cls(1.0 - delta, 1.0 + delta, count)

    @property
    def epsilons(self) -> np.ndarray:
        return np.linspace(self.eps_min, self.eps_max, self.count)


@dataclass(frozen=True)
class SimOptions:
    offset_omega: float = 0.0
    substeps: int = 1000

    def __post_init__(self):
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")


@dataclass
class StateProfile:
    epsilons: np.ndarray
    states: np.ndarray  # (N, 3)

    def to_csv(self, dest: Union[str, os.PathLike, io.TextIOBase]) -> None:
        _write_csv(dest, ["epsilon", "x", "y", "z"], np.column_stack([self.epsilons, self.states]))


@dataclass
class ErrorReport:
    l2_error: float
    per_eps_residual: np.ndarray
    epsilons: np.ndarray
    flip_table1: float | None = None
    flip_rf_sum: float | None = None

    def to_csv(self, dest) -> None:
        _write_csv(dest, ["epsilon", "residual"], np.column_stack([self.epsilons, self.per_eps_residual]))


def _write_csv(dest, header, rows):
    def _emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])

    if hasattr(dest, "write"):
        _emit(dest)
    else:
        with open(dest, "w", newline="") as fh:
            _emit(fh)


def _event_rotvecs(event, eps: np.ndarray, offset_omega: float) -> np.ndarray:
    """Rotation vectors (radians) of one event for every eps, shape (N, 3)."""
    eps = np.asarray(eps, dtype=float)
    if isinstance(event, ZShift):
        v = np.zeros(eps.shape + (3,))
        v[..., 2] = np.radians(event.angle_deg)
        return v
    flip = np.radians(event.flip_deg)
    phase = np.radians(event.phase_deg)
    v = np.empty(eps.shape + (3,))
    v[..., 0] = eps * flip * np.cos(phase)
    v[..., 1] = eps * flip * np.sin(phase)
    v[..., 2] = np.radians(event.offset_deg) + offset_omega * abs(flip)
    return v


def event_rotation(event, eps, offset_omega: float = 0.0) -> np.ndarray:
    """Rotation matrix (or stack of matrices) produced by ``event`` at ``eps``."""
    return rotvec_exp(_event_rotvecs(event, eps, offset_omega))


def apply_event(state, event, eps: float, offset_omega: float = 0.0) -> np.ndarray:
    """Rotate a single magnetisation vector by one event."""
    return event_rotation(event, float(eps), offset_omega) @ np.asarray(state, dtype=float)


def program_rotation(program: PulseProgram, eps, options: SimOptions | None = None) -> np.ndarray:
    """Net rotation of ``program`` for each eps, shape ``(N, 3, 3)`` (or ``(3, 3)`` for scalar eps)."""
    options = options or SimOptions()
    eps = np.asarray(eps, dtype=float)
    total = np.broadcast_to(np.eye(3), eps.shape + (3, 3)).copy()
    for block in program.blocks:
        mats = [event_rotation(ev, eps, options.offset_omega) for ev in block.events]
        unit = mats[0]
        for m in mats[1:]:
            unit = m @ unit
        for _ in range(block.reps):
            total = unit @ total
    return total


def simulate_program(
    program: PulseProgram,
    grid: EnsembleGrid | None = None,
    options: SimOptions | None = None,
    initial=Z_AXIS,
) -> StateProfile:
    """Final magnetisation for every eps on ``grid``."""
    grid = grid or EnsembleGrid()
    eps = grid.epsilons
    states = np.broadcast_to(np.asarray(initial, dtype=float), (eps.size, 3)).copy()
    options = options or SimOptions()
    for ev in program.events():
        R = event_rotation(ev, eps, options.offset_omega)
        states = np.einsum("nij,nj->ni", R, states)
    return StateProfile(eps, states)


def _target_states(target, eps: np.ndarray) -> np.ndarray:
    if callable(target):
        out = np.array([np.asarray(target(e), dtype=float) for e in eps])
    else:
        out = np.broadcast_to(np.asarray(target, dtype=float), (eps.size, 3))
    return out


TargetState = Union[np.ndarray, tuple, Callable[[float], np.ndarray]]


def l2_error(profile: StateProfile, target: TargetState = X_AXIS, program: PulseProgram | None = None) -> ErrorReport:
    """``sqrt(int ||X(eps) - X_target(eps)||^2 deps)`` by composite Simpson.

    ``target`` is a fixed unit vector or a function of eps. When ``program``
    is supplied both flip-angle totals are filled in.
    """
    eps = np.asarray(profile.epsilons, dtype=float)
    if eps.size < 3 or eps.size % 2 == 0:
        raise ValueError(f"profile needs an odd number (>= 3) of grid points, got {eps.size}")
    if not np.allclose(np.diff(eps), eps[1] - eps[0], rtol=1e-9, atol=1e-12):
        raise ValueError("profile grid must be uniform")
    resid = np.sum((profile.states - _target_states(target, eps)) ** 2, axis=1)
    e2 = simpson(resid, x=eps)
    report = ErrorReport(float(np.sqrt(max(e2, 0.0))), np.sqrt(resid), eps)
    if program is not None:
        report.flip_table1 = total_flip_angle(program, "paper_table1")
        report.flip_rf_sum = total_flip_angle(program, "rf_sum")
    return report


def evaluate_program(
    program: PulseProgram,
    grid: EnsembleGrid | None = None,
    target: TargetState = X_AXIS,
    options: SimOptions | None = None,
) -> ErrorReport:
    return l2_error(simulate_program(program, grid, options), target, program)


def segment_rotations(program: PulseProgram, eps: float = 1.0) -> list[np.ndarray]:
    """Per-event rotations in time order (repetitions expanded)."""
    return [event_rotation(ev, eps) for ev in program.events()]


def composed_rotation(program: PulseProgram, eps: float = 1.0) -> np.ndarray:
    return compose(segment_rotations(program, eps))
