"""Model comparison by deviation area against a reference gate output."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import oracle
from ..params import MODES, GateParams, steady_state
from .channels import ChannelModel, apply_channel, hybrid_schedule, settle_horizon
from .traces import DigitalTrace, SampledWaveform, TraceGenConfig, deviation_area, digitize, generate_traces

ORACLE = "oracle"


class NormalizationError(ValueError):
    pass


def oracle_waveform(params: GateParams, a: DigitalTrace, b: DigitalTrace, horizon: float,
                    vn_init: float = 0.0, step_ratio: float = 100.0) -> SampledWaveform:
    """RK4-integrated V_O for the input traces (no pure delay applied)."""
    init_mode, sched = hybrid_schedule(a, b)
    init = steady_state(params, init_mode, vn_init)
    sched = [s for s in sched if s[0] < horizon]
    if sched and sched[0][0] == 0.0:
        schedule = sched
    else:
        schedule = [(0.0, init_mode)] + sched
    cfg = oracle.default_config(params, MODES, step_ratio)
    s = oracle.integrate(params, schedule, init, horizon, cfg)
    return SampledWaveform(s.t, s.v_o)


def oracle_reference(params: GateParams, a: DigitalTrace, b: DigitalTrace, horizon: float,
                     vn_init: float = 0.0, step_ratio: float = 100.0) -> DigitalTrace:
    """Digitized oracle waveform, deferred by the pure delay."""
    wf = oracle_waveform(params, a, b, horizon, vn_init, step_ratio)
    return digitize(wf, params.v_th).shifted(params.delta_min)


@dataclass
class ComparisonReport:
    names: list[str]
    areas: np.ndarray  # repetitions x channels, seconds
    baseline: str | None = None
    normalized: dict[str, float] = field(default_factory=dict)

    @property
    def mean(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.areas.mean(axis=0))}

    @property
    def std(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.areas.std(axis=0))}

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["channel", "mean_area_s", "std_area_s", "normalized"])
            for n in self.names:
                norm = self.normalized.get(n)
                w.writerow([n, repr(self.mean[n]), repr(self.std[n]),
                            "" if norm is None else repr(norm)])

    def table(self) -> str:
        lines = [f"{'channel':<24}{'mean area [ps]':>16}{'std [ps]':>12}{'normalized':>12}"]
        for n in self.names:
            norm = self.normalized.get(n)
            lines.append(f"{n:<24}{self.mean[n] * 1e12:>16.4f}{self.std[n] * 1e12:>12.4f}"
                         f"{'' if norm is None else f'{norm:.4f}':>12}")
        return "\n".join(lines)


def compare_models(params: GateParams, channels: Sequence[ChannelModel], cfg: TraceGenConfig,
                   reference: ChannelModel | str = ORACLE, repetitions: int = 20,
                   normalize: bool = True, baseline: str = "inertial",
                   step_ratio: float = 100.0) -> ComparisonReport:
    """Mean deviation area of each channel against ``reference`` over random input traces.

    Repetition k uses trace seed ``cfg.seed + k``.  With ``normalize`` every
    mean is divided by the mean of the channel named ``baseline``.
    """
    if not channels:
        raise ValueError("need at least one channel")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    names = [c.name for c in channels]
    if len(set(names)) != len(names):
        raise ValueError("channel names must be unique")
    if normalize and baseline not in names:
        raise NormalizationError(f"normalization needs a '{baseline}' channel")
    settle = settle_horizon(params)
    areas = np.zeros((repetitions, len(channels)))
    for k in range(repetitions):
        a, b = generate_traces(replace(cfg, seed=cfg.seed + k), 2)
        last = max(a.transitions[-1] if len(a) else 0.0, b.transitions[-1] if len(b) else 0.0)
        horizon = last + settle
        if reference == ORACLE:
            ref = oracle_reference(params, a, b, horizon, step_ratio=step_ratio)
        elif isinstance(reference, ChannelModel):
            ref = apply_channel(reference, a, b)
        else:
            raise ValueError(f"unknown reference {reference!r}")
        for j, ch in enumerate(channels):
            areas[k, j] = deviation_area(ref, apply_channel(ch, a, b), horizon)
    report = ComparisonReport(names, areas)
    if normalize:
        base = report.mean[baseline]
        if base == 0.0:
            raise NormalizationError(f"baseline '{baseline}' has zero deviation; "
                                     "normalized values are undefined")
        report.baseline = baseline
        report.normalized = {n: m / base for n, m in report.mean.items()}
    return report
