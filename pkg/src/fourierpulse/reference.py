"""Published reference designs, pulse listings and benchmark values.

Keys are ``(method, selection, n)`` with method ``"FSM"`` or ``"DeltaMod"``.
Angles are in degrees and match the printed precision. Benchmark flip
angles are in radians.
"""

from __future__ import annotations

from .notation import parse_program
from .records import DesignRecord, Method, Selection

METHODS = ("FSM", "DeltaMod")
SELECTIONS = ("heuristic", "greedy", "gradient")
TERMS = (2, 3, 4)

# (gammas, alphas) in degrees
DESIGNS = {
    ("FSM", "heuristic", 2): ([49.3, 196.5], [187.3, 33.8]),
    ("FSM", "heuristic", 3): ([49.3, 196.5, 369.0], [201.1, 49.2, 7.3]),
    ("FSM", "heuristic", 4): ([49.3, 196.5, 369.0, 546.0], [175.2903, 18.3977, -10.8059, -5.67454]),
    ("DeltaMod", "heuristic", 2): ([90.0, 270.0], [105.5, 16.7]),
    ("DeltaMod", "heuristic", 3): ([90.0, 270.0, 450.0], [108.3, 22.4, 4.3]),
    ("DeltaMod", "heuristic", 4): ([90.0, 270.0, 450.0, 630.0], [109.8, 25.7, 7.1, 1.2]),
    ("FSM", "greedy", 2): ([49.9, 192.7], [191.9, 35.9]),
    ("FSM", "greedy", 3): ([49.9, 192.7, 502.9], [197.4, 40.9, -3.8]),
    ("FSM", "greedy", 4): ([49.9, 192.7, 502.9, 666.8], [200.7, 43.7, -5.9, -1.9]),
    ("DeltaMod", "greedy", 2): ([86.7, 259.1], [105.5, 16.6]),
    ("DeltaMod", "greedy", 3): ([86.7, 259.1, 427.8], [108.2, 22.2, 4.1]),
    ("DeltaMod", "greedy", 4): ([86.7, 259.1, 427.8, 730.2], [108.5, 22.9, 4.6, -0.3]),
    ("FSM", "gradient", 2): ([51.5, 373.7], [163.4, -15.7]),
    ("FSM", "gradient", 3): ([52.4, 379.1, 550.3], [169.6, -23.9, -10.3]),
    ("FSM", "gradient", 4): ([53.1, 381.4, 554.0, 727.9], [174.4, -30.6, -19.0, -5.1]),
    ("DeltaMod", "gradient", 2): ([88.6, 265.1], [105.5, 16.6]),
    ("DeltaMod", "gradient", 3): ([89.1, 267.0, 444.5], [108.3, 22.4, 4.3]),
    ("DeltaMod", "gradient", 4): ([90.0, 270.0, 450.0, 630.0], [109.8, 25.7, 7.1, 1.2]),
}

# printed pulse listings
PROGRAMS = {
    ("FSM", "heuristic", 2): (
        r"[(49.3)_0(4.5)_{90}(98.5)_{180}(4.5)_{90}(49.3)_0]^{\times 21}[(196.5)_0(4.2)_{90}(393.0)_{180}(4.2)_{90}(196.5)_0]^{\times 4}"
    ),
    ("FSM", "heuristic", 3): (
        r"[(49.3)_0(4.4)_{90}(98.5)_{180}(4.4)_{90}(49.3)_0]^{\times 23}[(196.5)_0(4.1)_{90}(393.0)_{180}(4.1)_{90}(196.5)_0]^{\times 6}[(369.0)_0(3.6)_{90}(738.0)_{180}(3.6)_{90}(369.0)_0]^{\times 1}"
    ),
    ("FSM", "heuristic", 4): (
        r"[(49.3)_0(4.4)_{90}(98.5)_{180}(4.4)_{90}(49.3)_0]^{\times 20}[(196.5)_0(3.1)_{90}(393.0)_{180}(3.1)_{90}(196.5)_0]^{\times 3}[(369.0)_0(-2.7)_{90}(738.0)_{180}(-2.7)_{90}(369.0)_0]^{\times 2}[(546.0)_0(-2.8)_{90}(1092.1)_{180}(-2.8)_{90}(546.0)_0]^{\times 1}"
    ),
    ("DeltaMod", "heuristic", 2): (
        r"[(90.0)_0(180.0)_{175.6}(90.0)_0]^{\times 12}[(270.0)_0(540.0)_{175.8}(270.0)_0]^{\times 2}"
    ),
    ("DeltaMod", "heuristic", 3): (
        r"[(90.0)_0(180.0)_{175.8}(90.0)_0]^{\times 13}[(270.0)_0(540.0)_{176.3}(270.0)_0]^{\times 3}[(450.0)_0(900.0)_{177.9}(450.0)_0]^{\times 1}"
    ),
    ("DeltaMod", "heuristic", 4): (
        r"[(90.0)_0(180.0)_{175.8}(90.0)_0]^{\times 13}[(270.0)_0(540.0)_{175.7}(270.0)_0]^{\times 3}[(450.0)_0(900.0)_{176.4}(450.0)_0]^{\times 1}[(630.0)_0(1260.0)_{179.4}(630.0)_0]^{\times 1}"
    ),
    ("FSM", "greedy", 2): (
        r"[(49.9)_0(4.4)_{90}(99.9)_{180}(4.4)_{90}(49.9)_0]^{\times 22}[(192.7)_0(4.5)_{90}(385.4)_{180}(4.5)_{90}(192.7)_0]^{\times 4}"
    ),
    ("FSM", "greedy", 3): (
        r"[(49.9)_0(4.5)_{90}(99.9)_{180}(4.5)_{90}(49.9)_0]^{\times 22}[(192.7)_0(4.1)_{90}(385.4)_{180}(4.1)_{90}(192.7)_0]^{\times 5}[(502.9)_0(-1.9)_{90}(1005.8)_{180}(-1.9)_{90}(502.9)_0]^{\times 1}"
    ),
    ("FSM", "greedy", 4): (
        r"[(49.9)_0(4.4)_{90}(99.9)_{180}(4.4)_{90}(49.9)_0]^{\times 23}[(192.7)_0(4.4)_{90}(385.4)_{180}(4.4)_{90}(192.7)_0]^{\times 5}[(502.9)_0(-3.0)_{90}(1005.8)_{180}(-3.0)_{90}(502.9)_0]^{\times 1}[(666.8)_0(-0.9)_{90}(1333.7)_{180}(-0.9)_{90}(666.8)_0]^{\times 1}"
    ),
    ("DeltaMod", "greedy", 2): (
        r"[(86.7)_0(173.4)_{175.6}(86.7)_0]^{\times 12}[(259.1)_0(518.1)_{175.8}(259.1)_0]^{\times 2}"
    ),
    ("DeltaMod", "greedy", 3): (
        r"[(86.7)_0(173.4)_{175.8}(86.7)_0]^{\times 13}[(259.1)_0(518.1)_{176.3}(259.1)_0]^{\times 3}[(427.8)_0(855.7)_{177.9}(427.8)_0]^{\times 1}"
    ),
    ("DeltaMod", "greedy", 4): (
        r"[(86.7)_0(173.4)_{175.8}(86.7)_0]^{\times 13}[(259.1)_0(518.1)_{176.2}(259.1)_0]^{\times 3}[(427.8)_0(855.7)_{177.7}(427.8)_0]^{\times 1}[(730.2)_0(1460.5)_{180.2}(730.2)_0]^{\times 1}"
    ),
    ("FSM", "gradient", 2): (
        r"[(51.5)_0(4.3)_{90}(103.0)_{180}(4.3)_{90}(51.5)_0]^{\times 19}[(373.7)_0(-3.9)_{90}(747.4)_{180}(-3.9)_{90}(373.7)_0]^{\times 2}"
    ),
    ("FSM", "gradient", 3): (
        r"[(52.4)_0(4.5)_{90}(104.9)_{180}(4.5)_{90}(52.4)_0]^{\times 19}[(379.1)_0(-4.0)_{90}(758.2)_{180}(-4.0)_{90}(379.1)_0]^{\times 3}[(550.3)_0(-2.6)_{90}(1100.6)_{180}(-2.6)_{90}(550.3)_0]^{\times 2}"
    ),
    ("FSM", "gradient", 4): (
        r"[(53.1)_0(4.4)_{90}(106.1)_{180}(4.4)_{90}(53.1)_0]^{\times 20}[(381.4)_0(-3.8)_{90}(762.7)_{180}(-3.8)_{90}(381.4)_0]^{\times 4}[(554.0)_0(-3.2)_{90}(1108.0)_{180}(-3.2)_{90}(554.0)_0]^{\times 3}[(727.9)_0(-2.6)_{90}(1455.8)_{180}(-2.6)_{90}(727.9)_0]^{\times 1}"
    ),
    ("DeltaMod", "gradient", 2): (
        r"[(88.6)_0(177.1)_{175.6}(88.6)_0]^{\times 12}[(265.1)_0(530.1)_{175.9}(265.1)_0]^{\times 2}"
    ),
    ("DeltaMod", "gradient", 3): (
        r"[(89.1)_0(178.1)_{175.8}(89.1)_0]^{\times 13}[(267.0)_0(534.1)_{176.3}(267.0)_0]^{\times 3}[(444.5)_0(889.0)_{177.9}(444.5)_0]^{\times 1}"
    ),
    ("DeltaMod", "gradient", 4): (
        r"[(90.0)_0(180.0)_{175.8}(90.0)_0]^{\times 13}[(270.0)_0(540.0)_{175.7}(270.0)_0]^{\times 3}[(450.0)_0(900.0)_{176.4}(450.0)_0]^{\times 1}[(630.0)_0(1260.0)_{179.4}(630.0)_0]^{\times 1}"
    ),
}

# benchmark L2 errors, per n = 2, 3, 4
ERRORS = {
    ("FSM", "heuristic"): (0.06831, 0.06523, 0.06473),
    ("DeltaMod", "heuristic"): (0.02012, 0.00290, 0.00044),
    ("FSM", "greedy"): (0.04031, 0.01506, 0.00941),
    ("DeltaMod", "greedy"): (0.02029, 0.00422, 0.00247),
    ("FSM", "gradient"): (0.07339, 0.01874, 0.00423),
    ("DeltaMod", "gradient"): (0.01940, 0.00280, 0.00044),
}

# benchmark total flip angles (radians), per n = 2, 3, 4
FLIPS = {
    ("FSM", "heuristic"): (127.120, 187.200, 199.600),
    ("DeltaMod", "heuristic"): (115.230, 172.001, 216.138),
    ("FSM", "greedy"): (130.497, 179.062, 229.101),
    ("DeltaMod", "greedy"): (110.952, 165.178, 216.177),
    ("FSM", "gradient"): (120.519, 225.780, 347.413),
    ("DeltaMod", "gradient"): (113.341, 170.134, 216.137),
}


def _key(method, selection, n):
    return (Method.parse(method).value, Selection.parse(selection).value, int(n))


def cells():
    """Every ``(method, selection, n)`` key in table order."""
    return [(m, s, n) for s in SELECTIONS for m in METHODS for n in TERMS]


def design(method, selection, n) -> DesignRecord:
    key = _key(method, selection, n)
    gammas, alphas = DESIGNS[key]
    return DesignRecord(Method.parse(key[0]), 90.0, 0.5, list(gammas), list(alphas), Selection.parse(key[1]))


def program_text(method, selection, n) -> str:
    return PROGRAMS[_key(method, selection, n)]


def program(method, selection, n):
    key = _key(method, selection, n)
    return parse_program(PROGRAMS[key], method=key[0], theta_deg=90.0, delta=0.5)


def error(method, selection, n) -> float:
    key = _key(method, selection, n)
    return ERRORS[key[:2]][TERMS.index(key[2])]


def flip(method, selection, n) -> float:
    key = _key(method, selection, n)
    return FLIPS[key[:2]][TERMS.index(key[2])]
