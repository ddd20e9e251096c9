"""Digital traces: validation, CSV I/O, zero-time NOR, generation, digitization, metric."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DigitalTrace:
    """Initial logic level plus strictly increasing transition times (seconds).

    Levels alternate: after the k-th transition the level is
    ``initial ^ (k % 2)``.
    """

    initial: int
    transitions: np.ndarray

    def __post_init__(self):
        if self.initial not in (0, 1):
            raise TraceFormatError("initial level must be 0 or 1")
        t = np.asarray(self.transitions, dtype=float).reshape(-1)
        if not np.all(np.isfinite(t)):
            raise TraceFormatError("transition times must be finite")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise TraceFormatError("transition times must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "initial", int(self.initial))
        object.__setattr__(self, "transitions", t)

    @classmethod
    def constant(cls, level: int) -> DigitalTrace:
        return cls(level, np.empty(0))

    def __len__(self) -> int:
        return self.transitions.size

    def __eq__(self, other) -> bool:
        return (isinstance(other, DigitalTrace) and self.initial == other.initial
                and np.array_equal(self.transitions, other.transitions))

    @property
    def final(self) -> int:
        return self.initial ^ (self.transitions.size % 2)

    def level_at(self, t) -> np.ndarray | int:
        """Level at time(s) ``t``; a transition at exactly t has already happened."""
        k = np.searchsorted(self.transitions, t, side="right")
        return self.initial ^ (k % 2)

    def shifted(self, dt: float) -> DigitalTrace:
        return DigitalTrace(self.initial, self.transitions + dt)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "level"])
            w.writerow([repr(0.0), self.initial])
            lvl = self.initial
            for t in self.transitions:
                lvl ^= 1
                w.writerow([repr(float(t)), lvl])

    @classmethod
    def from_csv(cls, path: str | Path) -> DigitalTrace:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["time_s", "level"]:
            raise TraceFormatError(f"{path}: line 1: expected header time_s,level")
        if len(rows) < 2:
            raise TraceFormatError(f"{path}: missing initial-level row")
        times, levels = [], []
        for lineno, row in enumerate(rows[1:], start=2):
            try:
                t, lvl = float(row[0]), int(row[1])
            except (ValueError, IndexError) as exc:
                raise TraceFormatError(f"{path}: line {lineno}: {exc}") from exc
            if lvl not in (0, 1):
                raise TraceFormatError(f"{path}: line {lineno}: level must be 0 or 1")
            times.append(t)
            levels.append(lvl)
        if times[0] != 0.0:
            raise TraceFormatError(f"{path}: line 2: first row must be at t = 0")
        for lineno, (prev, cur) in enumerate(zip(levels, levels[1:]), start=3):
            if prev == cur:
                raise TraceFormatError(f"{path}: line {lineno}: levels must alternate")
        return cls(levels[0], np.array(times[1:]))


def nor_eval(a: DigitalTrace, b: DigitalTrace) -> DigitalTrace:
    """Zero-delay NOR; output changes only at input transition times."""
    times = np.union1d(a.transitions, b.transitions)
    init = int(not (a.initial or b.initial))
    if times.size == 0:
        return DigitalTrace.constant(init)
    out = 1 - (a.level_at(times) | b.level_at(times))
    prev = np.concatenate(([init], out[:-1]))
    return DigitalTrace(init, times[out != prev])


def deviation_area(reference: DigitalTrace, candidate: DigitalTrace, horizon: float) -> float:
    """Total time in [0, horizon] during which the two binary waveforms differ."""
    edges = np.union1d(reference.transitions, candidate.transitions)
    edges = edges[(edges > 0) & (edges < horizon)]
    pts = np.concatenate(([0.0], edges, [horizon]))
    left = pts[:-1]
    differ = reference.level_at(left) != candidate.level_at(left)
    return float(np.sum(np.diff(pts)[differ]))


@dataclass(frozen=True)
class SampledWaveform:
    t: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if t.shape != v.shape or t.ndim != 1 or t.size < 2:
            raise TraceFormatError("waveform needs >= 2 (time, voltage) samples")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise TraceFormatError("waveform samples must be finite")
        if not np.all(np.diff(t) > 0):
            raise TraceFormatError("waveform times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_csv(cls, path: str | Path) -> SampledWaveform:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["time_s", "voltage_v"]:
            raise TraceFormatError(f"{path}: line 1: expected header time_s,voltage_v")
        t, v = [], []
        for lineno, row in enumerate(rows[1:], start=2):
            try:
                t.append(float(row[0]))
                v.append(float(row[1]))
            except (ValueError, IndexError) as exc:
                raise TraceFormatError(f"{path}: line {lineno}: {exc}") from exc
        return cls(np.array(t), np.array(v))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "voltage_v"])
            for a, b in zip(self.t, self.v):
                w.writerow([repr(float(a)), repr(float(b))])


def digitize(waveform: SampledWaveform, v_th: float) -> DigitalTrace:
    """Linear-interpolated threshold crossings; a sample above ``v_th`` reads as 1."""
    t, v = waveform.t, waveform.v
    high = v > v_th
    idx = np.nonzero(high[1:] != high[:-1])[0]
    v0, v1 = v[idx], v[idx + 1]
    tc = t[idx] + (v_th - v0) / (v1 - v0) * (t[idx + 1] - t[idx])
    kept: list[float] = []
    for x in tc:
        if kept and x <= kept[-1]:
            kept.pop()  # zero-width excursion through a sample exactly at v_th
        else:
            kept.append(float(x))
    return DigitalTrace(int(high[0]), np.array(kept))


# -- random traces --------------------------------------------------------------

@dataclass(frozen=True)
class TraceGenConfig:
    """Gaussian inter-transition gaps.

    LOCAL draws ``count`` transitions independently per input; GLOBAL draws
    one sequence of ``count * n_inputs`` events and assigns each to a random
    input, so near-coincident transitions on different inputs are rare.
    """

    mu: float = 100e-12
    sigma: float = 50e-12
    count: int = 500
    scope: Literal["LOCAL", "GLOBAL"] = "LOCAL"
    seed: int = 0
    floor: float = 1e-15
    initial: Sequence[int] | None = None

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.scope not in ("LOCAL", "GLOBAL"):
            raise ValueError("scope must be LOCAL or GLOBAL")
        if not self.floor > 0:
            raise ValueError("floor must be positive")


def _gaps(rng: np.random.Generator, cfg: TraceGenConfig, n: int) -> np.ndarray:
    return np.maximum(rng.normal(cfg.mu, cfg.sigma, n), cfg.floor)


def generate_traces(cfg: TraceGenConfig, n_inputs: int = 2) -> list[DigitalTrace]:
    rng = np.random.default_rng(cfg.seed)
    initial = list(cfg.initial) if cfg.initial is not None else [0] * n_inputs
    if len(initial) != n_inputs:
        raise ValueError("initial levels must match n_inputs")
    if cfg.scope == "LOCAL":
        return [DigitalTrace(initial[i], np.cumsum(_gaps(rng, cfg, cfg.count)))
                for i in range(n_inputs)]
    times = np.cumsum(_gaps(rng, cfg, cfg.count * n_inputs))
    owner = rng.integers(0, n_inputs, times.size)
    return [DigitalTrace(initial[i], times[owner == i]) for i in range(n_inputs)]
