"""Phase-modulated excitation and its first-order effective rotation.

The RF field of strength ``A * eps`` is applied over four intervals of
length ``dt = pi / A`` with the x-phase pattern ``0, pi, pi, 0`` while the
frame phase is swept at rate ``phase_rate(t)``. The lab-frame generator is
``A eps cos(phi) Omega_x - phase_rate(t) Omega_z``. For a linear sweep the
rate is ``-B`` on the first two intervals and ``+B`` on the last two; a
sampled shape ``f`` on ``[0, dt]`` is laid out as ``f(t)``, ``f(dt - t)``,
``-f(t)``, ``-f(dt - t)``.

To first order in ``B / A`` the net motion is a y-rotation whose angle
depends on eps, which makes these schedules useful building blocks for
dispersion-compensating pulses.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .pulses import Block, PulseProgram, RfSegment
from .so3 import axis_angle, rotation_angle, rotvec_exp

RATIO_WARN = 0.2

# x-field sign on each of the four intervals (phases 0, pi, pi, 0)
_X_SIGNS = (1.0, -1.0, -1.0, 1.0)


@dataclass(frozen=True)
class SampledShape:
    """Phase-rate samples ``f`` at uniformly spaced times ``t`` on ``[0, dt]``."""

    t: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if t.ndim != 1 or t.shape != f.shape:
            raise ValueError("t and f must be 1-D arrays of equal length")
        if t.size < 2:
            raise ValueError("a sampled shape needs at least two samples")
        step = np.diff(t)
        if np.any(step <= 0) or not np.allclose(step, step[0], rtol=1e-6, atol=0):
            raise ValueError("sample times must be uniformly spaced and increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "f", f)

    def __call__(self, tau):
        return np.interp(tau, self.t, self.f)


@dataclass(frozen=True)
class ModulationSpec:
    amplitude_A: float
    rate_B: float = 0.0
    shape: object = "linear"  # "linear" or SampledShape

    def __post_init__(self):
        if not self.amplitude_A > 0:
            raise ValueError(f"amplitude_A must be positive, got {self.amplitude_A}")
        if not self.rate_B >= 0:
            raise ValueError(f"rate_B must be non-negative, got {self.rate_B}")
        if isinstance(self.shape, str):
            if self.shape != "linear":
                raise ValueError(f"unknown shape {self.shape!r}")
        elif isinstance(self.shape, SampledShape):
            dt = self.dt
            if abs(self.shape.t[0]) > 1e-9 * dt or abs(self.shape.t[-1] - dt) > 1e-6 * dt:
                raise ValueError(f"sampled shape must span [0, pi/A] = [0, {dt:.6g}]")
            if np.max(np.abs(self.shape.f)) > self.rate_B * (1 + 1e-9) + 1e-15:
                raise ValueError("sampled shape exceeds rate_B in magnitude")
        else:
            raise TypeError(f"shape must be 'linear' or SampledShape, got {type(self.shape).__name__}")
        if self.rate_B / self.amplitude_A >= RATIO_WARN:
            warnings.warn(
                f"B/A = {self.rate_B / self.amplitude_A:.3g} >= {RATIO_WARN}; first-order results are unreliable",
                stacklevel=2,
            )

    @property
    def dt(self) -> float:
        return math.pi / self.amplitude_A

    @property
    def is_linear(self) -> bool:
        return isinstance(self.shape, str)


def _check_eps(eps):
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")


def _y_rotation(c: float) -> np.ndarray:
    return rotvec_exp(np.array([0.0, c, 0.0]))


def linear_coefficient(spec: ModulationSpec, eps: float) -> float:
    """First-order y-angle ``4B (1 - cos(pi eps)) / (A eps)`` of the linear sweep."""
    if not spec.is_linear:
        raise ValueError("linear_coefficient needs the linear shape")
    _check_eps(eps)
    return 4.0 * spec.rate_B * (1.0 - math.cos(math.pi * eps)) / (spec.amplitude_A * eps)


def linear_first_order(spec: ModulationSpec, eps: float) -> np.ndarray:
    return _y_rotation(linear_coefficient(spec, eps))


def arbitrary_coefficient(spec: ModulationSpec, eps: float) -> float:
    """First-order y-angle ``-4 * int_0^dt f(t) sin(A eps t) dt`` by Simpson's rule."""
    if spec.is_linear:
        raise ValueError("arbitrary_coefficient needs a sampled shape")
    _check_eps(eps)
    t, f = spec.shape.t, spec.shape.f
    if t.size < 3:
        raise ValueError(f"need at least 3 samples for Simpson quadrature, got {t.size}")
    return float(-4.0 * simpson(f * np.sin(spec.amplitude_A * eps * t), x=t))


def arbitrary_first_order(spec: ModulationSpec, eps: float) -> np.ndarray:
    return _y_rotation(arbitrary_coefficient(spec, eps))


def first_order_coefficient(spec: ModulationSpec, eps: float) -> float:
    return linear_coefficient(spec, eps) if spec.is_linear else arbitrary_coefficient(spec, eps)


@dataclass
class Schedule:
    """Piecewise control: slice durations, x-field signs and phase rates.

    ``phase_rates`` has shape ``(slices, 2)``: the rate at the two Gauss
    points of each slice (equal for the linear sweep).
    """

    durations: np.ndarray
    x_signs: np.ndarray
    phase_rates: np.ndarray


_GAUSS = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)


def schedule(spec: ModulationSpec, substeps: int = 1000) -> Schedule:
    """The four-interval control schedule.

    The linear sweep is exactly four constant slices. Sampled shapes use
    ``substeps`` slices per interval, each sampled at its two Gauss points.
    """
    dt = spec.dt
    if spec.is_linear:
        b = spec.rate_B
        rates = np.array([-b, -b, b, b])
        return Schedule(np.full(4, dt), np.array(_X_SIGNS), np.column_stack([rates, rates]))
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    h = dt / substeps
    start = np.arange(substeps) * h
    cols = []
    for c in _GAUSS:
        tau = start + c * h
        fwd = spec.shape(tau)
        back = spec.shape(dt - tau)
        cols.append(np.concatenate([fwd, back, -fwd, -back]))
    signs = np.repeat(_X_SIGNS, substeps)
    return Schedule(np.full(4 * substeps, h), signs, np.column_stack(cols))


def simulate_modulated(spec: ModulationSpec, eps: float, substeps: int = 1000) -> np.ndarray:
    """Propagator of the modulated schedule over ``[0, 4 dt]``.

    Each slice uses the fourth-order Magnus step with two Gauss points,
    which is exact for constant slices.
    """
    _check_eps(eps)
    sch = schedule(spec, substeps)
    h = sch.durations[:, None]
    gen = [np.column_stack([spec.amplitude_A * eps * sch.x_signs, np.zeros_like(h[:, 0]), -sch.phase_rates[:, k]])
           for k in (0, 1)]
    vecs = h / 2 * (gen[0] + gen[1]) + math.sqrt(3) / 12 * h**2 * np.cross(gen[1], gen[0])
    total = np.eye(3)
    for m in rotvec_exp(vecs):
        total = m @ total
    return total


def signed_y_angle(rotation) -> float:
    """Rotation angle, signed by the y component of the axis."""
    axis, angle = axis_angle(rotation)
    return float(angle if axis[1] >= 0 else -angle)


# ---------------------------------------------------------------------------
# robust composite
# ---------------------------------------------------------------------------


@dataclass
class CompositeReport:
    epsilons: np.ndarray
    net_angles: np.ndarray
    angle_at_one: float
    derivative_at_one: float
    fd_step: float = 1e-4
    extras: dict = field(default_factory=dict)

    @property
    def relative_slope(self) -> float:
        if self.angle_at_one == 0:
            return 0.0 if self.derivative_at_one == 0 else math.inf
        return abs(self.derivative_at_one) / abs(self.angle_at_one)


def composite_program(spec: ModulationSpec) -> PulseProgram:
    """Linear modulated block followed by a direct y pulse of ``8B/A`` radians.

    The sweep is carried as a z angle on each 180 degree segment; the direct
    pulse is eps-scaled by the simulator, which cancels the first-order eps
    dependence of the modulated block around eps = 1.
    """
    if not spec.is_linear:
        raise ValueError("the robust composite is defined for the linear sweep")
    z = math.degrees(spec.rate_B * spec.dt)
    segs = [
        RfSegment(180.0, 0.0, z),
        RfSegment(180.0, 180.0, z),
        RfSegment(180.0, 180.0, -z),
        RfSegment(180.0, 0.0, -z),
    ]
    kick = RfSegment(math.degrees(8.0 * spec.rate_B / spec.amplitude_A), 90.0)
    return PulseProgram((Block(tuple(segs)), Block((kick,))))


def robust_composite(spec: ModulationSpec, epsilons=None, fd_step: float = 1e-4):
    """Build the composite program and report its net y-angle against eps."""
    from .bloch import composed_rotation

    program = composite_program(spec)
    eps = np.linspace(0.5, 1.5, 101) if epsilons is None else np.asarray(epsilons, dtype=float)

    def angle(e):
        return signed_y_angle(composed_rotation(program, float(e)))

    net = np.array([angle(e) for e in eps])
    deriv = (angle(1.0 + fd_step) - angle(1.0 - fd_step)) / (2.0 * fd_step)
    return program, CompositeReport(eps, net, angle(1.0), deriv, fd_step)


def geodesic_gap(spec: ModulationSpec, eps: float, substeps: int = 1000) -> float:
    """Geodesic distance between the simulated and first-order rotations."""
    sim = simulate_modulated(spec, eps, substeps)
    first = _y_rotation(first_order_coefficient(spec, eps))
    return rotation_angle(first.T @ sim)


def load_shape_csv(path, amplitude_A: float, rate_B: float | None = None) -> ModulationSpec:
    """Read a sampled phase-rate shape from a CSV with columns ``t,f``.

    ``rate_B`` defaults to the largest ``|f|``.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"t", "f"} <= {c.strip() for c in reader.fieldnames}:
            raise ValueError(f"{path}: expected columns 't,f', got {reader.fieldnames}")
        rows = [{k.strip(): v for k, v in row.items()} for row in reader]
    try:
        t = np.array([float(r["t"]) for r in rows])
        f = np.array([float(r["f"]) for r in rows])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: non-numeric sample ({exc})") from None
    shape = SampledShape(t, f)
    b = float(np.max(np.abs(f))) if rate_B is None else rate_B
    return ModulationSpec(amplitude_A, b, shape)
