"""MIS (Charlie-effect) delays of the hybrid NOR model.

Input separation is ``delta = t_B - t_A``.  Falling-output delays are measured
from the earlier input, rising-output delays from the later one; the pure
delay ``delta_min`` is added to every result.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

from .lintraj import PiecewiseTrajectory, chain
from .params import M00, M01, M10, M11, GateParams, StateVector

Polarity = Literal["rising", "falling"]

DEFAULT_HORIZON = 1e-7
# |delta| standing in for +-infinity
INF_PROXY = 2e-10


class DelayError(RuntimeError):
    """No output threshold crossing within the horizon."""


def falling_schedule(delta: float):
    if delta == 0:
        return [(0.0, M11)]
    return [(0.0, M10 if delta > 0 else M01), (abs(delta), M11)]


def rising_schedule(delta: float):
    if delta == 0:
        return [(0.0, M00)]
    return [(0.0, M01 if delta > 0 else M10), (abs(delta), M00)]


def falling_trajectory(params: GateParams, delta: float) -> PiecewiseTrajectory:
    """Inputs long at 00, first riser at t = 0, second at |delta|."""
    return chain(params, StateVector(params.v_dd, params.v_dd), falling_schedule(delta))


def rising_trajectory(params: GateParams, delta: float, vn_init: float = 0.0) -> PiecewiseTrajectory:
    """Inputs at 11 with V_N = vn_init, first faller at t = 0, second at |delta|."""
    return chain(params, StateVector(vn_init, 0.0), rising_schedule(delta))


def delay_falling(params: GateParams, delta: float, horizon: float = DEFAULT_HORIZON) -> float:
    traj = falling_trajectory(params, delta)
    t_o = traj.threshold_crossing(params.v_th, "falling", horizon)
    if t_o is None:
        raise DelayError(f"no falling output crossing within {horizon:g} s (delta={delta:g})")
    return t_o + params.delta_min


def delay_rising(params: GateParams, delta: float, vn_policy: float = 0.0,
                 horizon: float = DEFAULT_HORIZON) -> float:
    if not 0.0 <= vn_policy <= params.v_dd:
        raise ValueError("initial V_N must lie in [0, v_dd]")
    t_s = abs(delta)
    traj = rising_trajectory(params, delta, vn_policy)
    t_o = traj.threshold_crossing(params.v_th, "rising", t_s + horizon)
    if t_o is None:
        raise DelayError(f"no rising output crossing within {horizon:g} s (delta={delta:g})")
    return t_o - t_s + params.delta_min


def delay(params: GateParams, polarity: Polarity, delta: float, vn_policy: float = 0.0,
          horizon: float = DEFAULT_HORIZON) -> float:
    if polarity == "falling":
        return delay_falling(params, delta, horizon)
    if polarity == "rising":
        return delay_rising(params, delta, vn_policy, horizon)
    raise ValueError(f"polarity must be 'rising' or 'falling', got {polarity!r}")


@dataclass
class DelayCurve:
    polarity: Polarity
    vn_policy: float
    samples: list[tuple[float, float]] = field(default_factory=list)

    @property
    def deltas(self) -> list[float]:
        return [d for d, _ in self.samples]

    @property
    def delays(self) -> list[float]:
        return [v for _, v in self.samples]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["delta_s", "delay_s"])
            for d, v in self.samples:
                w.writerow([repr(float(d)), repr(float(v))])


def delay_curve(params: GateParams, polarity: Polarity, vn_policy: float,
                deltas: Sequence[float], horizon: float = DEFAULT_HORIZON) -> DelayCurve:
    deltas = [float(d) for d in deltas]
    if any(not b > a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly increasing")
    curve = DelayCurve(polarity, vn_policy)
    for d in deltas:
        try:
            curve.samples.append((d, delay(params, polarity, d, vn_policy, horizon)))
        except DelayError as exc:
            raise DelayError(f"delay curve failed at delta={d!r}: {exc}") from exc
    return curve
