"""Text notation for pulse programs.

Grammar (whitespace-insensitive, angles in degrees)::

    program := block+
    block   := "[" segment+ "]" repeat
    repeat  := "^"? ( "{" times INT "}" | times INT )
    times   := "×" | "x" | "\\times"
    segment := "(" DECIMAL ")" "_" ( "{" DECIMAL "}" | DECIMAL )

``(49.3)_0`` is a 49.3 degree pulse at phase 0; ``[...]^{×12}`` repeats a
block twelve times. Serialisation rounds to 0.1 degree; nothing else in the
package rounds.
"""

from __future__ import annotations

import re

from .pulses import Block, PulseProgram, RfSegment, ZShift

_NUMBER = re.compile(r"[+\-−]?(?:\d+(?:\.\d*)?|\.\d+)")
_INT = re.compile(r"\d+")
_TIMES = ("\\times", "×", "x", "X")


class PulseParseError(ValueError):
    """Malformed pulse text. ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at_end(self) -> bool:
        return self.peek() == ""

    def error(self, message: str):
        raise PulseParseError(message, self.pos, self.text)

    def expect(self, literal: str):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            self.error(f"expected {literal!r}, found {found!r}")
        self.pos += len(literal)

    def accept(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def number(self) -> float:
        self.skip_ws()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group().replace("−", "-"))

    def integer(self) -> int:
        self.skip_ws()
        m = _INT.match(self.text, self.pos)
        if not m:
            self.error("expected a repetition count")
        self.pos = m.end()
        return int(m.group())


def _parse_segment(sc: _Scanner) -> RfSegment:
    sc.expect("(")
    flip = sc.number()
    sc.expect(")")
    sc.expect("_")
    if sc.accept("{"):
        phase = sc.number()
        sc.expect("}")
    else:
        phase = sc.number()
    return RfSegment(flip, phase)


def _parse_times(sc: _Scanner):
    sc.skip_ws()
    for tok in _TIMES:
        if sc.text.startswith(tok, sc.pos):
            sc.pos += len(tok)
            return
    sc.error("missing repetition count (expected '×' or 'x')")


def _parse_repeat(sc: _Scanner) -> int:
    sc.accept("^")
    if sc.accept("{"):
        _parse_times(sc)
        reps = sc.integer()
        sc.expect("}")
    else:
        _parse_times(sc)
        reps = sc.integer()
    if reps < 1:
        sc.error("repetition count must be at least 1")
    return reps


def _parse_block(sc: _Scanner) -> Block:
    sc.expect("[")
    segments = []
    while sc.peek() == "(":
        segments.append(_parse_segment(sc))
    if not segments:
        sc.error("empty block")
    if sc.peek() != "]":
        sc.error("unbalanced bracket or malformed segment")
    sc.expect("]")
    return Block(tuple(segments), _parse_repeat(sc))


def parse_program(text: str, **meta) -> PulseProgram:
    """Parse one program. ``meta`` is forwarded to :class:`PulseProgram`."""
    sc = _Scanner(text)
    blocks = []
    while not sc.at_end():
        if sc.peek() != "[":
            sc.error(f"expected '[', found {sc.peek()!r}")
        blocks.append(_parse_block(sc))
    if not blocks:
        raise PulseParseError("empty pulse program", sc.pos, text)
    return PulseProgram(tuple(blocks), **meta)


def parse_programs(text: str) -> list[PulseProgram]:
    """Parse a file body: one program per line, blank lines and ``#`` comments skipped."""
    programs = []
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0]
        if body.strip():
            try:
                programs.append(parse_program(body))
            except PulseParseError as exc:
                raise PulseParseError(str(exc).rsplit(" at position", 1)[0], offset + exc.position, text) from None
        offset += len(line)
    if not programs:
        raise PulseParseError("no pulse program found", 0, text)
    return programs


def _fmt_flip(x: float) -> str:
    s = f"{x:.1f}"
    return "0.0" if s == "-0.0" else s


def _fmt_phase(p: float) -> str:
    p = round(p, 1) % 360.0
    s = f"{p:.1f}"
    if s.endswith(".0"):
        s = s[:-2]
    if s == "360":
        s = "0"
    return s if len(s) == 1 else "{" + s + "}"


def serialize_program(program: PulseProgram, separator: str = " ") -> str:
    """Render a program in the bracket notation, rounding to 0.1 degree."""
    parts = []
    for block in program.blocks:
        segs = []
        for ev in block.events:
            if isinstance(ev, ZShift):
                raise ValueError("z-shift events have no text form; compile with phase-encoded blocks")
            if ev.offset_deg != 0.0:
                raise ValueError("segments with a resonance offset have no text form")
            segs.append(f"({_fmt_flip(ev.flip_deg)})_{_fmt_phase(ev.phase_deg)}")
        parts.append("[" + "".join(segs) + "]^{×" + str(block.reps) + "}")
    return separator.join(parts)


def canonical(text: str) -> str:
    """Canonical re-formatting of pulse text."""
    return serialize_program(parse_program(text))
