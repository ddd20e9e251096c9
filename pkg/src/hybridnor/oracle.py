"""Fixed-step RK4 reference integration of the NOR mode ODEs.

The right-hand sides are written directly from the node currents of each RC
topology; nothing here touches the closed-form solutions in ``lintraj``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .params import GateParams, Mode, StateVector


@dataclass(frozen=True)
class IntegrationConfig:
    step: float
    method: str = "rk4"

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.method != "rk4":
            raise ValueError(f"unsupported method {self.method!r}")


@dataclass
class Samples:
    t: np.ndarray
    v_n: np.ndarray
    v_o: np.ndarray

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "v_n", "v_o"])
            for row in zip(self.t, self.v_n, self.v_o):
                w.writerow([repr(float(x)) for x in row])


def rhs(params: GateParams, mode: Mode, v_n: float, v_o: float) -> tuple[float, float]:
    """(dV_N/dt, dV_O/dt) from Kirchhoff's current law at N and O."""
    p = params
    a, b = mode
    i_n = 0.0  # current into C_int
    i_o = 0.0  # current into C_out
    if not a and not b:
        i1 = (p.v_dd - v_n) / p.r1
        i2 = (v_n - v_o) / p.r2
        i_n = i1 - i2
        i_o = i2
    elif not a and b:
        i_n = (p.v_dd - v_n) / p.r1
        i_o = -v_o / p.r4
    elif a and not b:
        i2 = (v_n - v_o) / p.r2
        i_n = -i2
        i_o = i2 - v_o / p.r3
    else:
        i_o = -v_o / p.r3 - v_o / p.r4
    return i_n / p.c_int, i_o / p.c_out


def rk4_step(f, y: tuple[float, float], h: float) -> tuple[float, float]:
    k1 = f(*y)
    k2 = f(y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1])
    k3 = f(y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1])
    k4 = f(y[0] + h * k3[0], y[1] + h * k3[1])
    return (y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))


def _step_map(params: GateParams, mode: Mode, h: float):
    """One RK4 step as the affine map y -> M y + m.

    The right-hand side is affine, so RK4 is affine in y; probing it at 0 and
    the unit vectors recovers the map exactly, and repeated steps become
    powers of one augmented 3x3 matrix.
    """
    def f(x, y):
        return rhs(params, mode, x, y)

    m = rk4_step(f, (0.0, 0.0), h)
    e1 = rk4_step(f, (1.0, 0.0), h)
    e2 = rk4_step(f, (0.0, 1.0), h)
    return (e1[0] - m[0], e2[0] - m[0], e1[1] - m[1], e2[1] - m[1]), m


def jacobian(params: GateParams, mode: Mode) -> np.ndarray:
    f0 = rhs(params, mode, 0.0, 0.0)
    f1 = rhs(params, mode, 1.0, 0.0)
    f2 = rhs(params, mode, 0.0, 1.0)
    return np.array([[f1[0] - f0[0], f2[0] - f0[0]], [f1[1] - f0[1], f2[1] - f0[1]]])


def min_time_constant(params: GateParams, mode: Mode) -> float:
    rates = np.abs(np.linalg.eigvals(jacobian(params, mode)))
    return float(1.0 / rates.max())


def default_config(params: GateParams, modes: Sequence[Mode], ratio: float = 1000.0) -> IntegrationConfig:
    """Step = (smallest time constant over ``modes``) / ratio."""
    tau = min(min_time_constant(params, Mode(*m)) for m in modes)
    return IntegrationConfig(step=tau / ratio)


def integrate(params: GateParams, schedule: Sequence[tuple[float, Mode]], init: StateVector,
              horizon: float, cfg: IntegrationConfig | None = None) -> Samples:
    """Dense RK4 samples of (t, V_N, V_O) on [0, horizon].

    Each segment is cut into equal steps no larger than ``cfg.step`` so that
    every mode switch falls exactly on a sample.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if not schedule or float(schedule[0][0]) != 0.0:
        raise ValueError("schedule must start at t = 0")
    times = [float(t) for t, _ in schedule]
    if any(not b > a for a, b in zip(times, times[1:])):
        raise ValueError("switch times must be strictly increasing")
    modes = [Mode(*m) for _, m in schedule]
    active = [m for t, m in zip(times, modes) if t < horizon]
    if cfg is None:
        cfg = default_config(params, active)
    for m in set(active):
        if cfg.step > min_time_constant(params, m) / 100 * (1 + 1e-12):
            raise ValueError(f"step {cfg.step:g} s exceeds 1/100 of the smallest "
                             f"time constant of mode {m}")

    t_parts = [np.array([0.0])]
    y_parts = [np.array([[float(init[0]), float(init[1])]])]
    y = np.array([float(init[0]), float(init[1]), 1.0])
    ends = times[1:] + [horizon]
    for t0, t1, mode in zip(times, ends, modes):
        t1 = min(t1, horizon)
        if t1 <= t0:
            break
        n = max(1, math.ceil((t1 - t0) / cfg.step * (1 - 1e-12)))
        h = (t1 - t0) / n
        (m00, m01, m10, m11), (b0, b1) = _step_map(params, mode, h)
        aug = np.array([[m00, m01, b0], [m10, m11, b1], [0.0, 0.0, 1.0]])
        seg = _powers(aug, n)[1:] @ y
        tk = t0 + h * np.arange(1, n + 1)
        tk[-1] = t1
        t_parts.append(tk)
        y_parts.append(seg[:, :2])
        y = seg[-1].copy()
    t = np.concatenate(t_parts)
    v = np.concatenate(y_parts)
    return Samples(t, v[:, 0].copy(), v[:, 1].copy())


def _powers(aug: np.ndarray, n: int) -> np.ndarray:
    """aug**k for k = 0..n by doubling; row k maps the state k steps ahead."""
    out = np.empty((n + 1, 3, 3))
    out[0] = np.eye(3)
    filled = 1
    while filled < n + 1:
        take = min(filled, n + 1 - filled)
        step = out[filled - 1] @ aug
        out[filled:filled + take] = out[:take] @ step
        filled += take
    return out


def crossing_from_samples(t: np.ndarray, v: np.ndarray, v_target: float,
                          direction: str) -> float | None:
    """First linearly interpolated crossing of ``v_target`` in ``direction``."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float) - v_target
    if direction == "falling":
        idx = np.nonzero((v[:-1] > 0) & (v[1:] <= 0))[0]
    elif direction == "rising":
        idx = np.nonzero((v[:-1] <= 0) & (v[1:] > 0))[0]
    else:
        raise ValueError(f"direction must be 'rising' or 'falling', got {direction!r}")
    if idx.size == 0:
        return None
    i = int(idx[0])
    return float(t[i] + (0.0 - v[i]) / (v[i + 1] - v[i]) * (t[i + 1] - t[i]))
