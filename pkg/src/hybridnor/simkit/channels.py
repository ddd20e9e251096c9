"""Delay channels: pure, inertial, exponential involution, and the hybrid NOR gate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .. import misdelay
from ..lintraj import crossings, eval_traj, solve_mode
from ..params import GateParams, Mode, steady_state
from .traces import DigitalTrace, nor_eval

Variant = Literal["pure", "inertial", "exp_involution", "hybrid_nor"]


class HorizonError(RuntimeError):
    """The gate output is still switching when the simulation horizon ends."""


@dataclass(frozen=True)
class ChannelModel:
    """One channel variant with its own parameters.

    pure: ``delay``.  inertial: ``delay`` and ``threshold`` (defaults to the
    delay).  exp_involution: ``tau_rise``, ``tau_fall``, ``delta_min`` and the
    voltage levels.  hybrid_nor: ``params``.
    """

    variant: Variant
    name: str = ""
    delay: float = 0.0
    threshold: float | None = None
    tau_rise: float = 0.0
    tau_fall: float = 0.0
    delta_min: float = 0.0
    v_dd: float = 1.0
    v_th: float = 0.5
    params: GateParams | None = None
    vn_init: float = 0.0

    def __post_init__(self):
        if self.variant not in ("pure", "inertial", "exp_involution", "hybrid_nor"):
            raise ValueError(f"unknown channel variant {self.variant!r}")
        for key in ("delay", "tau_rise", "tau_fall", "delta_min"):
            if getattr(self, key) < 0:
                raise ValueError(f"{key} must be non-negative")
        if self.threshold is not None and self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        if self.variant == "exp_involution":
            if not (self.tau_rise > 0 and self.tau_fall > 0):
                raise ValueError("exp_involution needs positive time constants")
            if not 0 < self.v_th < self.v_dd:
                raise ValueError("need 0 < v_th < v_dd")
        if self.variant == "hybrid_nor" and self.params is None:
            raise ValueError("hybrid_nor needs GateParams")
        if not self.name:
            object.__setattr__(self, "name", self.variant)

    @classmethod
    def pure(cls, delay: float, name: str = "") -> ChannelModel:
        return cls("pure", name=name, delay=delay)

    @classmethod
    def inertial(cls, delay: float, threshold: float | None = None, name: str = "") -> ChannelModel:
        return cls("inertial", name=name, delay=delay, threshold=threshold)

    @classmethod
    def exp_involution(cls, tau_rise: float, tau_fall: float, delta_min: float = 0.0,
                       v_dd: float = 1.0, v_th: float | None = None, name: str = "") -> ChannelModel:
        return cls("exp_involution", name=name, tau_rise=tau_rise, tau_fall=tau_fall,
                   delta_min=delta_min, v_dd=v_dd, v_th=v_dd / 2 if v_th is None else v_th)

    @classmethod
    def hybrid(cls, params: GateParams, vn_init: float = 0.0, name: str = "") -> ChannelModel:
        return cls("hybrid_nor", name=name, params=params, vn_init=vn_init)

    # involution delay functions (pure delay included); T = input time minus previous output time
    def delay_up(self, T):
        te = np.asarray(T, dtype=float) + self.delta_min
        x = self.v_th * np.exp(-te / self.tau_fall)
        return self.delta_min + self.tau_rise * np.log((self.v_dd - x) / (self.v_dd - self.v_th))

    def delay_down(self, T):
        te = np.asarray(T, dtype=float) + self.delta_min
        x = self.v_dd - (self.v_dd - self.v_th) * np.exp(-te / self.tau_rise)
        return self.delta_min + self.tau_fall * np.log(x / self.v_th)

    def domain_down(self) -> float:
        """Infimum of T for which ``delay_down`` is defined."""
        return -self.tau_rise * math.log(self.v_dd / (self.v_dd - self.v_th)) - self.delta_min

    def domain_up(self) -> float:
        return -self.tau_fall * math.log(self.v_dd / self.v_th) - self.delta_min

    def to_dict(self) -> dict:
        d = {"variant": self.variant, "name": self.name}
        if self.variant in ("pure", "inertial"):
            d["delay"] = self.delay
            if self.variant == "inertial":
                d["threshold"] = self.threshold
        elif self.variant == "exp_involution":
            d.update(tau_rise=self.tau_rise, tau_fall=self.tau_fall, delta_min=self.delta_min,
                     v_dd=self.v_dd, v_th=self.v_th)
        else:
            d.update(params=self.params.to_dict(), vn_init=self.vn_init)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> ChannelModel:
        data = dict(data)
        if "params" in data and isinstance(data["params"], dict):
            data["params"] = GateParams.from_dict(data["params"])
        return cls(**data)


def apply_pure(channel: ChannelModel, trace: DigitalTrace) -> DigitalTrace:
    return trace.shifted(channel.delay)


def apply_inertial(channel: ChannelModel, trace: DigitalTrace) -> DigitalTrace:
    """Shift, then cancel pulses narrower than the threshold, cascading."""
    thr = channel.delay if channel.threshold is None else channel.threshold
    kept: list[float] = []
    for t in trace.transitions + channel.delay:
        if kept and t - kept[-1] < thr:
            kept.pop()
        else:
            kept.append(float(t))
    return DigitalTrace(trace.initial, np.array(kept))


def apply_exp_involution(channel: ChannelModel, trace: DigitalTrace) -> DigitalTrace:
    """Two-mode first-order RC channel: charge to v_dd / discharge to 0 after each input edge.

    An output edge is emitted where the waveform crosses v_th, unless the next
    input edge reverses the waveform first; all output edges are deferred by
    ``delta_min``.
    """
    c = channel
    level = trace.initial
    x = c.v_dd if level else 0.0
    out: list[float] = []
    times = trace.transitions
    for k, t0 in enumerate(times):
        level ^= 1
        t_next = times[k + 1] if k + 1 < times.size else math.inf
        if level:
            tau, target = c.tau_rise, c.v_dd
            t_cross = tau * math.log((c.v_dd - x) / (c.v_dd - c.v_th)) if x < c.v_th else None
        else:
            tau, target = c.tau_fall, 0.0
            t_cross = tau * math.log(x / c.v_th) if x > c.v_th else None
        if t_cross is not None and t0 + t_cross < t_next:
            out.append(t0 + t_cross + c.delta_min)
        if math.isfinite(t_next):
            x = target + (x - target) * math.exp(-(t_next - t0) / tau)
    return DigitalTrace(trace.initial, np.array(out))


def settle_horizon(params: GateParams) -> float:
    """Generous settling time: 60 of the slowest model time constants, at least 1 ns."""
    from ..lintraj import eigenvalues
    from ..params import MODES
    slow = min(abs(lam) for m in MODES for lam in eigenvalues(params, m) if lam != 0.0)
    return max(1e-9, 60.0 / slow)


def hybrid_schedule(a: DigitalTrace, b: DigitalTrace) -> tuple[Mode, list[tuple[float, Mode]]]:
    """Initial mode and the (time, mode) switches implied by the two inputs."""
    init_mode = Mode(bool(a.initial), bool(b.initial))
    times = np.union1d(a.transitions, b.transitions)
    la, lb = a.level_at(times), b.level_at(times)
    sched = []
    prev = init_mode
    for t, x, y in zip(times, la, lb):
        m = Mode(bool(x), bool(y))
        if m != prev:
            sched.append((float(t), m))
            prev = m
    return init_mode, sched


def apply_hybrid_nor(params: GateParams, a: DigitalTrace, b: DigitalTrace,
                     vn_init: float = 0.0, horizon: float | None = None) -> DigitalTrace:
    """Run the four-mode model over both input traces with one continuous state.

    The gate starts settled in the mode of the initial input levels (V_N =
    ``vn_init`` if that mode is 11).  Output edges are the v_th crossings of
    V_O, shifted by ``params.delta_min``.
    """
    init_mode, sched = hybrid_schedule(a, b)
    state = steady_state(params, init_mode, vn_init)
    last = sched[-1][0] if sched else 0.0
    if horizon is None:
        horizon = last + settle_horizon(params)
    level = int(state.v_o > params.v_th)
    initial = level
    out: list[float] = []
    starts = [0.0] + [t for t, _ in sched]
    modes = [init_mode] + [m for _, m in sched]
    ends = starts[1:] + [horizon]
    for t0, t1, mode in zip(starts, ends, modes):
        seg = solve_mode(params, mode, state)
        if t1 > t0:
            for tc, d in crossings(seg, params.v_th, (0.0, t1 - t0)):
                new = 1 if d == "rising" else 0
                if new != level:
                    out.append(t0 + tc)
                    level = new
            state = eval_traj(seg, t1 - t0)
        else:
            state = eval_traj(seg, 0.0)
    final_v_o = steady_state(params, modes[-1], state.v_n).v_o
    if int(final_v_o > params.v_th) != level:
        raise HorizonError(f"output still switching at horizon {horizon:g} s")
    return DigitalTrace(initial, np.array(out) + params.delta_min)


def apply_channel(channel: ChannelModel, a: DigitalTrace, b: DigitalTrace) -> DigitalTrace:
    """Gate output for inputs ``a``, ``b``: single-input channels follow a zero-time NOR."""
    if channel.variant == "hybrid_nor":
        return apply_hybrid_nor(channel.params, a, b, channel.vn_init)
    nor = nor_eval(a, b)
    if channel.variant == "pure":
        return apply_pure(channel, nor)
    if channel.variant == "inertial":
        return apply_inertial(channel, nor)
    return apply_exp_involution(channel, nor)


def sis_delays(params: GateParams, vn_policy: float = 0.0) -> dict[str, float]:
    """Single-input-switching delays (delta_min included) at the +-inf proxy."""
    inf = misdelay.INF_PROXY
    return {
        "fall_minus": misdelay.delay_falling(params, -inf),
        "fall_plus": misdelay.delay_falling(params, inf),
        "rise_minus": misdelay.delay_rising(params, -inf, vn_policy),
        "rise_plus": misdelay.delay_rising(params, inf, vn_policy),
    }


def exp_channel_for(params: GateParams, delta_min: float = 20e-12,
                    vn_policy: float = 0.0) -> ChannelModel:
    """Exp channel whose SIS delays equal the hybrid model's averaged SIS delays."""
    s = sis_delays(params, vn_policy)
    rise = (s["rise_minus"] + s["rise_plus"]) / 2 - delta_min
    fall = (s["fall_minus"] + s["fall_plus"]) / 2 - delta_min
    if rise <= 0 or fall <= 0:
        raise ValueError("delta_min exceeds the averaged SIS delays")
    v, vt = params.v_dd, params.v_th
    return ChannelModel.exp_involution(rise / math.log(v / (v - vt)), fall / math.log(v / vt),
                                       delta_min, v, vt, name="exp_involution")


def inertial_for(params: GateParams, vn_policy: float = 0.0,
                 threshold: float | None = None) -> ChannelModel:
    """Inertial channel with the mean of the four SIS delays."""
    s = sis_delays(params, vn_policy)
    return ChannelModel.inertial(sum(s.values()) / 4, threshold, name="inertial")
