"""Design records and their on-disk form."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np


class Method(str, Enum):
    """Pulse-element family.

    ``FSM`` uses conjugated y-pulses, effective profile
    ``eps * sum(alpha_k cos(gamma_k eps))``; ``DeltaMod`` uses instantaneous
    z-frame kicks, effective profile ``sum(alpha_k sin(gamma_k eps))``.
    """

    FSM = "FSM"
    DMOD = "DeltaMod"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"fsm": cls.FSM, "deltamod": cls.DMOD, "dmod": cls.DMOD, "delta": cls.DMOD}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown method {value!r}; expected one of fsm, dmod") from None


class Selection(str, Enum):
    HEURISTIC = "heuristic"
    GREEDY = "greedy"
    GRADIENT = "gradient"

    @classmethod
    def parse(cls, value) -> "Selection":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown selection {value!r}; expected one of heuristic, greedy, gradient"
            ) from None


@dataclass
class DesignRecord:
    """Result of a synthesis run. Angles are in degrees, kept at full precision."""

    method: Method
    theta_deg: float
    delta: float
    gammas_deg: list[float]
    alphas_deg: list[float]
    selection: Selection = Selection.HEURISTIC
    seed: int = 0
    extras: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.method = Method.parse(self.method)
        self.selection = Selection.parse(self.selection)
        self.gammas_deg = [float(g) for g in self.gammas_deg]
        self.alphas_deg = [float(a) for a in self.alphas_deg]
        if len(self.gammas_deg) != len(self.alphas_deg):
            raise ValueError(
                f"gammas_deg and alphas_deg differ in length "
                f"({len(self.gammas_deg)} != {len(self.alphas_deg)})"
            )
        g = np.asarray(self.gammas_deg)
        if g.size and (np.any(g <= 0) or np.any(np.diff(g) <= 0)):
            raise ValueError(f"frequencies must be positive and strictly ascending, got {self.gammas_deg}")
        if not 0.0 < float(self.delta) < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def gammas(self) -> np.ndarray:
        """Frequencies in radians."""
        return np.radians(self.gammas_deg)

    @property
    def alphas(self) -> np.ndarray:
        """Amplitudes in radians."""
        return np.radians(self.alphas_deg)

    @property
    def theta(self) -> float:
        return float(np.radians(self.theta_deg))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extras")
        d["method"] = self.method.value
        d["selection"] = self.selection.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "DesignRecord":
        required = ("method", "theta_deg", "delta", "gammas_deg", "alphas_deg", "selection", "seed")
        missing = [k for k in required if k not in data]
        if missing:
            raise ValueError(f"design record is missing fields: {', '.join(missing)}")
        unknown = set(data) - set(required)
        if unknown:
            raise ValueError(f"design record has unknown fields: {', '.join(sorted(unknown))}")
        return cls(**{k: data[k] for k in required})


def save_design(design: DesignRecord, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(design.to_dict(), fh, indent=2)
        fh.write("\n")


def load_design(path: str | os.PathLike) -> DesignRecord:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not a valid design record ({exc})") from exc
    return DesignRecord.from_dict(data)
