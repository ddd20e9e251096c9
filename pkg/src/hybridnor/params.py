"""Gate parameters, input modes and node-voltage state shared by every module."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import NamedTuple


class ParameterError(ValueError):
    """Raised for invalid or non-finite gate parameters / states."""


_KEYS = ("r1", "r2", "r3", "r4", "c_int", "c_out", "v_dd", "v_th", "delta_min")


@dataclass(frozen=True)
class GateParams:
    """RC model of a 2-input NOR gate, strict SI units.

    r1, r2 are the series pMOS on-resistances (V_DD->N, N->O), r3, r4 the
    parallel nMOS on-resistances (O->GND). ``c_int`` sits at the internal
    node N, ``c_out`` at the output. ``v_th`` defaults to ``v_dd / 2``.
    """

    r1: float
    r2: float
    r3: float
    r4: float
    c_int: float
    c_out: float
    v_dd: float = 0.8
    v_th: float | None = None
    delta_min: float = 0.0

    def __post_init__(self):
        if self.v_th is None:
            object.__setattr__(self, "v_th", self.v_dd / 2)
        for key in _KEYS:
            value = getattr(self, key)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f"{key} must be a finite number, got {value!r}")
        for key in ("r1", "r2", "r3", "r4", "c_int", "c_out", "v_dd"):
            if getattr(self, key) <= 0:
                raise ParameterError(f"{key} must be strictly positive")
        if not 0 < self.v_th < self.v_dd:
            raise ParameterError("v_th must lie strictly between 0 and v_dd")
        if self.delta_min < 0:
            raise ParameterError("delta_min must be non-negative")

    def with_(self, **changes) -> GateParams:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict) -> GateParams:
        unknown = set(data) - set(_KEYS)
        if unknown:
            raise ParameterError(f"unknown parameter keys: {sorted(unknown)}")
        missing = {"r1", "r2", "r3", "r4", "c_int", "c_out"} - set(data)
        if missing:
            raise ParameterError(f"missing parameter keys: {sorted(missing)}")
        return cls(**{k: float(v) for k, v in data.items()})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> GateParams:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ParameterError("parameter file must hold a JSON object")
        return cls.from_dict(data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> GateParams:
        return cls.from_json(Path(path).read_text())


# Fitted values for a 15 nm NOR gate, V_DD = 0.8 V; 18 ps pure delay.
TABLE_I = GateParams(
    r1=37088.32043327145,
    r2=44925.83293787842,
    r3=45149.85667051946,
    r4=48761.4927022873,
    c_int=5.948581669628511e-17,
    c_out=6.172588967251559e-16,
    v_dd=0.8,
    delta_min=18e-12,
)


class Mode(NamedTuple):
    """Logic levels of inputs (A, B); selects one of four RC topologies."""

    a: bool
    b: bool

    @classmethod
    def parse(cls, text: str) -> Mode:
        text = str(text).strip()
        if len(text) != 2 or any(ch not in "01" for ch in text):
            raise ValueError(f"mode must be one of 00, 01, 10, 11; got {text!r}")
        return cls(text[0] == "1", text[1] == "1")

    def __str__(self) -> str:
        return f"{int(self.a)}{int(self.b)}"


M00 = Mode(False, False)
M01 = Mode(False, True)
M10 = Mode(True, False)
M11 = Mode(True, True)
MODES = (M00, M01, M10, M11)


class StateVector(NamedTuple):
    """Node voltages (V_N, V_O) in volts."""

    v_n: float
    v_o: float


def steady_state(params: GateParams, mode: Mode, v_n_frozen: float = 0.0) -> StateVector:
    """Equilibrium of ``mode``; in mode 11 node N is isolated and keeps ``v_n_frozen``."""
    if mode == M00:
        return StateVector(params.v_dd, params.v_dd)
    if mode == M01:
        return StateVector(params.v_dd, 0.0)
    if mode == M10:
        return StateVector(0.0, 0.0)
    return StateVector(v_n_frozen, 0.0)
