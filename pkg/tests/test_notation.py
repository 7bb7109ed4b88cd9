import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourierpulse import reference
from fourierpulse.notation import PulseParseError, canonical, parse_program, parse_programs, serialize_program
from fourierpulse.pulses import Block, PulseProgram, RfSegment, ZShift


def test_parse_printed_forms():
    a = parse_program(r"[(49.3)_0(4.5)_{90}(98.5)_{180}(4.5)_{90}(49.3)_0]^{\times 21}")
    b = parse_program("[(49.3)_0(4.5)_90(98.5)_180(4.5)_90(49.3)_0]×21")
    c = parse_program("[ (49.3)_0 (4.5)_{90} (98.5)_{180} (4.5)_{90} (49.3)_0 ]^{x21}")
    assert a.blocks == b.blocks == c.blocks
    assert a.blocks[0].reps == 21 and a.blocks[0].events[1] == RfSegment(4.5, 90.0)


def test_negative_flips_and_unicode_minus():
    p = parse_program("[(369.0)_0(−2.7)_{90}(738.0)_{180}(-2.7)_{90}(369.0)_0]^{×2}")
    assert p.blocks[0].events[1].flip_deg == -2.7 == p.blocks[0].events[3].flip_deg


@pytest.mark.parametrize(
    "text, where",
    [
        ("[(90.0)_0(180.0)_{175.6}(90.0)_0", 32),
        ("[(90.0)_0]", 10),
        ("[]^{×2}", 1),
        ("[(90.0)_]^{×2}", 8),
        ("(90.0)_0", 0),
        ("[(90.0)_0]^{×2} junk", 16),
    ],
)
def test_malformed_text_reports_position(text, where):
    with pytest.raises(PulseParseError) as info:
        parse_program(text)
    assert info.value.position == where


def test_empty_input():
    with pytest.raises(PulseParseError):
        parse_program("   ")
    with pytest.raises(PulseParseError):
        parse_programs("# only a comment\n")


def test_parse_programs_offsets_point_into_the_file():
    text = "[(1)_0]^{×1}\n[(1)_0]^{×}\n"
    with pytest.raises(PulseParseError) as info:
        parse_programs(text)
    assert text[info.value.position] == "}"


def test_serialize_format():
    p = PulseProgram((Block((RfSegment(90.0), RfSegment(180.0, 175.6000001), RfSegment(90.0)), 12),))
    assert serialize_program(p) == "[(90.0)_0(180.0)_{175.6}(90.0)_0]^{×12}"
    with pytest.raises(ValueError):
        serialize_program(PulseProgram((Block((ZShift(3.0),)),)))


@pytest.mark.parametrize("key", sorted(reference.PROGRAMS))
def test_listing_round_trip(key):
    text = reference.PROGRAMS[key]
    program = parse_program(text)
    again = serialize_program(program)
    assert parse_program(again).blocks == program.blocks
    assert canonical(again) == again


segment = st.builds(
    RfSegment,
    st.integers(-20000, 20000).map(lambda k: k / 10),
    st.integers(0, 3599).map(lambda k: k / 10),
)
block = st.builds(Block, st.lists(segment, min_size=1, max_size=6).map(tuple), st.integers(1, 40))
program = st.lists(block, min_size=1, max_size=5).map(lambda b: PulseProgram(tuple(b)))


@given(program)
@settings(max_examples=300, deadline=None)
def test_round_trip_on_one_decimal_programs(prog):
    text = serialize_program(prog)
    assert parse_program(text).blocks == prog.blocks
    assert serialize_program(parse_program(text)) == text
