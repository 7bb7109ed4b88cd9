"""Pulse programs: data model, amplitude splitting, compilation, flip-angle accounting.

A program is a list of blocks, each repeated ``reps`` times. Blocks hold
RF segments (nominal flip and phase, both in degrees; the flip is scaled by
the dispersion factor eps during simulation) and z-shifts (exact frame
rotations, never scaled by eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Union


from .records import DesignRecord, Method, Selection


@dataclass(frozen=True)
class RfSegment:
    """Hard RF pulse about the in-plane axis ``(cos phase, sin phase, 0)``.

    ``offset_deg`` is an optional z-rotation angle accrued while the segment
    is on (a resonance offset expressed in angle units). It is not scaled by
    eps and is zero for every pulse the compilers emit.
    """

    flip_deg: float
    phase_deg: float = 0.0
    offset_deg: float = 0.0

    def __post_init__(self):
        for name in ("flip_deg", "phase_deg", "offset_deg"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
        phase = float(self.phase_deg) % 360.0
        if phase == 360.0:
            phase = 0.0
        object.__setattr__(self, "flip_deg", float(self.flip_deg))
        object.__setattr__(self, "phase_deg", phase)
        object.__setattr__(self, "offset_deg", float(self.offset_deg))


@dataclass(frozen=True)
class ZShift:
    """Instantaneous frame rotation about z (a delta pulse of phase)."""

    angle_deg: float

    def __post_init__(self):
        if not math.isfinite(self.angle_deg):
            raise ValueError(f"angle_deg must be finite, got {self.angle_deg!r}")
        object.__setattr__(self, "angle_deg", float(self.angle_deg))


Event = Union[RfSegment, ZShift]


@dataclass(frozen=True)
class Block:
    events: tuple
    reps: int = 1

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if int(self.reps) != self.reps or self.reps < 1:
            raise ValueError(f"block repetition count must be a positive integer, got {self.reps!r}")
        object.__setattr__(self, "reps", int(self.reps))
        if not self.events:
            raise ValueError("a block needs at least one event")
        for ev in self.events:
            if not isinstance(ev, (RfSegment, ZShift)):
                raise TypeError(f"unsupported event {ev!r}")


@dataclass(frozen=True)
class PulseProgram:
    blocks: tuple
    method: Method | None = None
    theta_deg: float | None = None
    delta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ValueError("a pulse program needs at least one block")
        if self.method is not None:
            object.__setattr__(self, "method", Method.parse(self.method))

    def events(self) -> Iterator[Event]:
        """Every event in time order with repetitions expanded."""
        for block in self.blocks:
            for _ in range(block.reps):
                yield from block.events

    @property
    def n_events(self) -> int:
        return sum(len(b.events) * b.reps for b in self.blocks)


# ---------------------------------------------------------------------------
# compilation
# ---------------------------------------------------------------------------


def split_amplitude(alpha_deg: float, threshold_deg: float = 9.0) -> tuple[int, float]:
    """Split an amplitude into ``reps`` equal pieces no larger than the threshold.

    >>> split_amplitude(16.6, 9.0)
    (2, 8.3)
    """
    if not threshold_deg > 0:
        raise ValueError(f"threshold_deg must be positive, got {threshold_deg!r}")
    reps = max(1, math.ceil(abs(alpha_deg) / threshold_deg))
    return reps, alpha_deg / reps


def _ordered(design: DesignRecord, reverse: bool):
    pairs = list(zip(design.gammas_deg, design.alphas_deg))
    return pairs[::-1] if reverse else pairs


def _meta(design: DesignRecord) -> dict:
    return {"method": design.method, "theta_deg": design.theta_deg, "delta": design.delta}


def compile_dmod(
    design: DesignRecord, threshold_deg: float = 9.0, *, explicit_z: bool = False, reverse: bool = False
) -> PulseProgram:
    """Compile a delta-modulation design into phase-shifted 3-segment blocks.

    Each frequency becomes ``[(g)_0 (2g)_{180 - a/2} (g)_0]^reps`` where ``a``
    is the per-repetition amplitude. With ``explicit_z`` the equivalent form
    ``(g)_0 Z(+a/2) (2g)_180 Z(-a/2) (g)_0`` is emitted instead.
    """
    if design.method is not Method.DMOD:
        raise ValueError(f"compile_dmod needs a DeltaMod design, got {design.method.value}")
    blocks = []
    for gamma, alpha in _ordered(design, reverse):
        reps, a = split_amplitude(alpha, threshold_deg)
        if explicit_z:
            events = (
                RfSegment(gamma, 0.0),
                ZShift(a / 2.0),
                RfSegment(2.0 * gamma, 180.0),
                ZShift(-a / 2.0),
                RfSegment(gamma, 0.0),
            )
        else:
            events = (RfSegment(gamma, 0.0), RfSegment(2.0 * gamma, 180.0 - a / 2.0), RfSegment(gamma, 0.0))
        blocks.append(Block(events, reps))
    return PulseProgram(tuple(blocks), **_meta(design))


def compile_fsm(design: DesignRecord, threshold_deg: float = 9.0, *, reverse: bool = False) -> PulseProgram:
    """Compile a Fourier-synthesis design into 5-segment blocks.

    Each frequency becomes ``[(g)_0 (b/2)_90 (2g)_180 (b/2)_90 (g)_0]^reps``
    with ``b`` the per-repetition amplitude; negative amplitudes stay signed.
    """
    if design.method is not Method.FSM:
        raise ValueError(f"compile_fsm needs an FSM design, got {design.method.value}")
    blocks = []
    for gamma, alpha in _ordered(design, reverse):
        reps, b = split_amplitude(alpha, threshold_deg)
        events = (
            RfSegment(gamma, 0.0),
            RfSegment(b / 2.0, 90.0),
            RfSegment(2.0 * gamma, 180.0),
            RfSegment(b / 2.0, 90.0),
            RfSegment(gamma, 0.0),
        )
        blocks.append(Block(events, reps))
    return PulseProgram(tuple(blocks), **_meta(design))


def compile_design(design: DesignRecord, threshold_deg: float = 9.0, *, reverse: bool = False) -> PulseProgram:
    if design.method is Method.FSM:
        return compile_fsm(design, threshold_deg, reverse=reverse)
    return compile_dmod(design, threshold_deg, reverse=reverse)


# ---------------------------------------------------------------------------
# block recognition
# ---------------------------------------------------------------------------


class BlockShape(NamedTuple):
    kind: str  # "fsm" or "dmod"
    gamma_deg: float
    amplitude_deg: float  # per repetition
    reps: int


def _close(a, b, tol):
    return abs(a - b) <= tol


def _phase_close(p, q, tol):
    d = (p - q + 180.0) % 360.0 - 180.0
    return abs(d) <= tol


def classify_block(block: Block, tol: float = 0.11) -> BlockShape | None:
    """Recognise FSM and delta-modulation blocks.

    ``tol`` (degrees) absorbs the independent 0.1 degree rounding of the
    segments in a printed listing. Returns None for anything else.
    """
    ev = block.events
    rf = [e for e in ev if isinstance(e, RfSegment)]
    if any(e.offset_deg != 0.0 for e in rf):
        return None
    if len(ev) == 5 and len(rf) == 5:
        g, b1, g2, b2, g3 = ev
        phases_ok = all(
            _phase_close(e.phase_deg, p, tol) for e, p in zip(ev, (0.0, 90.0, 180.0, 90.0, 0.0))
        )
        if (
            phases_ok
            and _close(g.flip_deg, g3.flip_deg, tol)
            and _close(g2.flip_deg, 2.0 * g.flip_deg, 2 * tol)
            and _close(b1.flip_deg, b2.flip_deg, tol)
        ):
            return BlockShape("fsm", g.flip_deg, b1.flip_deg + b2.flip_deg, block.reps)
    if len(ev) == 3 and len(rf) == 3:
        g, mid, g3 = ev
        if (
            _phase_close(g.phase_deg, 0.0, tol)
            and _phase_close(g3.phase_deg, 0.0, tol)
            and _close(g.flip_deg, g3.flip_deg, tol)
            and _close(mid.flip_deg, 2.0 * g.flip_deg, 2 * tol)
        ):
            # phase 180 - a/2, wrapped so that a lies in (-360, 360]
            half = (180.0 - mid.phase_deg + 180.0) % 360.0 - 180.0
            return BlockShape("dmod", g.flip_deg, 2.0 * half, block.reps)
    if len(ev) == 5 and len(rf) == 3:
        g, z1, mid, z2, g3 = ev
        if (
            isinstance(z1, ZShift)
            and isinstance(z2, ZShift)
            and _close(z1.angle_deg, -z2.angle_deg, 1e-12)
            and _phase_close(g.phase_deg, 0.0, tol)
            and _phase_close(mid.phase_deg, 180.0, tol)
            and _phase_close(g3.phase_deg, 0.0, tol)
            and _close(mid.flip_deg, 2.0 * g.flip_deg, 2 * tol)
        ):
            return BlockShape("dmod", g.flip_deg, 2.0 * z1.angle_deg, block.reps)
    return None


def infer_design(program: PulseProgram, theta_deg: float = 90.0, delta: float = 0.5) -> DesignRecord:
    """Recover frequencies and total amplitudes from a compiled program.

    Every block must be recognisable and all blocks must share one method.
    Blocks with equal frequency are merged.
    """
    shapes = [classify_block(b) for b in program.blocks]
    if any(s is None for s in shapes):
        bad = [i for i, s in enumerate(shapes) if s is None]
        raise ValueError(f"blocks {bad} are neither FSM nor delta-modulation blocks")
    kinds = {s.kind for s in shapes}
    if len(kinds) != 1:
        raise ValueError("program mixes FSM and delta-modulation blocks")
    method = Method.FSM if kinds == {"fsm"} else Method.DMOD
    totals: dict[float, float] = {}
    for s in shapes:
        totals[s.gamma_deg] = totals.get(s.gamma_deg, 0.0) + s.reps * s.amplitude_deg
    gammas = sorted(totals)
    return DesignRecord(
        method=method,
        theta_deg=program.theta_deg if program.theta_deg is not None else theta_deg,
        delta=program.delta if program.delta is not None else delta,
        gammas_deg=gammas,
        alphas_deg=[totals[g] for g in gammas],
        selection=Selection.HEURISTIC,
    )


# ---------------------------------------------------------------------------
# flip-angle accounting
# ---------------------------------------------------------------------------


def total_flip_angle(program: PulseProgram, convention: str = "paper_table1") -> float:
    """Total flip angle of a program, in radians.

    ``rf_sum`` adds ``|flip|`` over every RF segment. ``paper_table1`` is the
    accounting used for the published benchmark table: an FSM block counts
    only its x-axis pulses (``4 * gamma`` per repetition) while a
    delta-modulation block counts ``4 * gamma + |a|`` per repetition, the
    second term being the area of its two z-kicks. Blocks of neither shape
    fall back to ``rf_sum``.
    """
    if convention not in ("paper_table1", "rf_sum"):
        raise ValueError(f"unknown convention {convention!r}")
    total = 0.0
    for block in program.blocks:
        shape = classify_block(block) if convention == "paper_table1" else None
        if shape is None:
            per_rep = sum(abs(e.flip_deg) for e in block.events if isinstance(e, RfSegment))
        elif shape.kind == "fsm":
            per_rep = 4.0 * abs(shape.gamma_deg)
        else:
            per_rep = 4.0 * abs(shape.gamma_deg) + abs(shape.amplitude_deg)
        total += block.reps * per_rep
    return math.radians(total)
