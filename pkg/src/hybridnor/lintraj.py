"""Closed-form trajectories of the four NOR modes, mode chaining and threshold crossings.

Every mode is an affine 2x2 system  V' = A V + g  for V = (V_N, V_O).  Its
solution is written as

    V(t) = offset + c1 * vec1 * exp(lambda1 t) + c2 * vec2 * exp(lambda2 t)

with lambda1 >= lambda2.  For the coupled modes 10 and 00 the eigenvectors are
(1/(C_int R2), alpha +/- beta); the diagonal modes 11 and 01 use unit vectors.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from scipy.optimize import brentq

from .params import M00, M01, M10, M11, GateParams, Mode, ParameterError, StateVector

Direction = Literal["rising", "falling"]

DEGENERACY_TOL = 1e-12
ROOT_XTOL = 1e-30  # seconds; the relative tolerance (4 eps) governs in practice


class DegenerateModeError(ParameterError):
    """The coupled mode has (numerically) repeated eigenvalues."""


@dataclass(frozen=True)
class AnalyticTrajectory:
    mode: Mode
    lambda1: float
    lambda2: float
    coeff1: float
    coeff2: float
    vec1: tuple[float, float]
    vec2: tuple[float, float]
    offset: StateVector
    alpha: float | None = None  # only for the coupled modes 10 / 00
    beta: float = 0.0
    gamma: float = 0.0

    def __call__(self, t: float) -> StateVector:
        return eval_traj(self, t)

    def v_o(self, t: float) -> float:
        return (self.offset[1] + self.coeff1 * self.vec1[1] * math.exp(self.lambda1 * t)
                + self.coeff2 * self.vec2[1] * math.exp(self.lambda2 * t))

    def dv_o(self, t: float) -> float:
        return (self.coeff1 * self.vec1[1] * self.lambda1 * math.exp(self.lambda1 * t)
                + self.coeff2 * self.vec2[1] * self.lambda2 * math.exp(self.lambda2 * t))

    @property
    def init(self) -> StateVector:
        return eval_traj(self, 0.0)

    @property
    def min_time_constant(self) -> float:
        rates = [abs(lam) for lam in (self.lambda1, self.lambda2) if lam != 0.0]
        return 1.0 / max(rates)


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ParameterError(f"non-finite input {v!r}")


def coupled_constants(params: GateParams, mode: Mode) -> tuple[float, float, float]:
    """(alpha, beta, gamma) of the coupled mode 10 or 00."""
    p = params
    if mode == M10:
        den = 2 * p.c_out * p.c_int * p.r2 * p.r3
        s = p.c_out * p.r3 + p.c_int * (p.r2 + p.r3)
        alpha = (p.c_out * p.r3 - p.c_int * (p.r2 + p.r3)) / den
        disc = s * s - 4 * p.c_out * p.c_int * p.r2 * p.r3
    elif mode == M00:
        den = 2 * p.c_out * p.c_int * p.r1 * p.r2
        s = p.c_int * p.r1 + p.c_out * (p.r1 + p.r2)
        alpha = (p.c_out * (p.r1 + p.r2) - p.c_int * p.r1) / den
        disc = s * s - 4 * p.c_out * p.c_int * p.r1 * p.r2
    else:
        raise ValueError(f"mode {mode} is not coupled")
    beta = math.sqrt(max(disc, 0.0)) / den
    gamma = -s / den
    return alpha, beta, gamma


def eigenvalues(params: GateParams, mode: Mode) -> tuple[float, float]:
    """(lambda1, lambda2) with lambda1 >= lambda2."""
    traj = solve_mode(params, mode, StateVector(0.0, 0.0))
    return traj.lambda1, traj.lambda2


def solve_mode(params: GateParams, mode: Mode, init: StateVector,
               degeneracy_tol: float = DEGENERACY_TOL) -> AnalyticTrajectory:
    """Closed-form solution of ``mode`` starting from ``init`` at t = 0."""
    init = StateVector(*init)
    _check_finite(*init)
    mode = Mode(*mode)
    p = params
    alpha = None
    beta = gamma = 0.0
    if mode == M11:
        k = 1.0 / (p.c_out * p.r3) + 1.0 / (p.c_out * p.r4)
        lam1, lam2 = 0.0, -k
        vec1, vec2 = (1.0, 0.0), (0.0, 1.0)
        offset = StateVector(0.0, 0.0)
    elif mode == M01:
        kn = 1.0 / (p.c_int * p.r1)
        ko = 1.0 / (p.c_out * p.r4)
        if kn <= ko:
            lam1, lam2, vec1, vec2 = -kn, -ko, (1.0, 0.0), (0.0, 1.0)
        else:
            lam1, lam2, vec1, vec2 = -ko, -kn, (0.0, 1.0), (1.0, 0.0)
        offset = StateVector(p.v_dd, 0.0)
    else:
        alpha, beta, gamma = coupled_constants(p, mode)
        if beta <= degeneracy_tol * abs(gamma):
            raise DegenerateModeError(
                f"mode {mode}: repeated eigenvalue (beta={beta:g}, gamma={gamma:g})")
        lam2 = gamma - beta
        if mode == M10:
            det = 1.0 / (p.c_int * p.c_out * p.r2 * p.r3)
        else:
            det = 1.0 / (p.c_int * p.c_out * p.r1 * p.r2)
        # product form avoids cancellation in gamma + beta
        lam1 = det / lam2
        e = 1.0 / (p.c_int * p.r2)
        vec1, vec2 = (e, alpha + beta), (e, alpha - beta)
        offset = StateVector(0.0, 0.0) if mode == M10 else StateVector(p.v_dd, p.v_dd)
    if beta == 0.0:
        gamma, beta = (lam1 + lam2) / 2, (lam1 - lam2) / 2

    rx, ry = init.v_n - offset.v_n, init.v_o - offset.v_o
    det_v = vec1[0] * vec2[1] - vec2[0] * vec1[1]
    c1 = (rx * vec2[1] - vec2[0] * ry) / det_v
    c2 = (vec1[0] * ry - rx * vec1[1]) / det_v
    return AnalyticTrajectory(mode, lam1, lam2, c1, c2, vec1, vec2, offset,
                              alpha=alpha, beta=beta, gamma=gamma)


def eval_traj(traj: AnalyticTrajectory, t: float) -> StateVector:
    """State at time ``t`` (relative to the trajectory start)."""
    if not math.isfinite(t):
        raise ValueError(f"non-finite time {t!r}")
    e1 = traj.coeff1 * math.exp(traj.lambda1 * t)
    e2 = traj.coeff2 * math.exp(traj.lambda2 * t)
    return StateVector(traj.offset[0] + e1 * traj.vec1[0] + e2 * traj.vec2[0],
                       traj.offset[1] + e1 * traj.vec1[1] + e2 * traj.vec2[1])


def _monotone_breaks(traj: AnalyticTrajectory, lo: float, hi: float) -> list[float]:
    """Split [lo, hi] into pieces on which v_o is monotone (at most one extremum)."""
    a1 = traj.coeff1 * traj.vec1[1] * traj.lambda1
    a2 = traj.coeff2 * traj.vec2[1] * traj.lambda2
    pts = [lo]
    # dv_o = a1 e^{l1 t} + a2 e^{l2 t} = 0  ->  e^{(l1-l2) t} = -a2 / a1
    if a1 != 0.0 and a2 != 0.0 and (a1 > 0) != (a2 > 0) and traj.lambda1 != traj.lambda2:
        t_ext = math.log(-a2 / a1) / (traj.lambda1 - traj.lambda2)
        if lo < t_ext < hi:
            pts.append(t_ext)
    pts.append(hi)
    return pts


def crossings(traj: AnalyticTrajectory, v_target: float,
              window: tuple[float, float]) -> list[tuple[float, Direction]]:
    """All threshold crossings of v_o in ``window`` (at most two), in time order.

    A touch without sign change is not a crossing.  A value exactly at the
    target at the left window edge counts when v_o leaves in the crossing
    direction; exactly at the right edge it does not (not yet crossed).
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError("window must satisfy t_lo < t_hi")

    def f(t):
        return traj.v_o(t) - v_target

    out: list[tuple[float, Direction]] = []
    pts = _monotone_breaks(traj, lo, hi)
    for a, b in zip(pts[:-1], pts[1:]):
        fa, fb = f(a), f(b)
        if fa >= 0.0 > fb:
            direction: Direction = "falling"
        elif fa <= 0.0 < fb:
            direction = "rising"
        else:
            continue
        if fa == 0.0:
            t = a
        else:
            t = brentq(f, a, b, xtol=ROOT_XTOL, rtol=4 * 2.220446049250313e-16)
        if out and t <= out[-1][0]:
            # zero-width excursion at a piece boundary: cancel both
            out.pop()
            continue
        out.append((t, direction))
    return out


def threshold_crossing(traj: AnalyticTrajectory, v_target: float, direction: Direction,
                       window: tuple[float, float]) -> float | None:
    """Earliest crossing of ``v_target`` by v_o in ``direction`` within ``window``."""
    if direction not in ("rising", "falling"):
        raise ValueError(f"direction must be 'rising' or 'falling', got {direction!r}")
    for t, d in crossings(traj, v_target, window):
        if d == direction:
            return t
    return None


@dataclass(frozen=True)
class PiecewiseTrajectory:
    """Chained mode segments; segment i is active on [starts[i], starts[i+1])."""

    starts: tuple[float, ...]
    segments: tuple[AnalyticTrajectory, ...]

    def segment_index(self, t: float) -> int:
        return max(bisect.bisect_right(self.starts, t) - 1, 0)

    def __call__(self, t: float) -> StateVector:
        i = self.segment_index(t)
        return eval_traj(self.segments[i], t - self.starts[i])

    def v_o(self, t: float) -> float:
        return self(t).v_o

    def sample(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized (v_n, v_o) at an array of times."""
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.starts, t, side="right") - 1, 0, None)
        v_n = np.empty_like(t)
        v_o = np.empty_like(t)
        for i, seg in enumerate(self.segments):
            sel = idx == i
            if not sel.any():
                continue
            tt = t[sel] - self.starts[i]
            e1 = seg.coeff1 * np.exp(seg.lambda1 * tt)
            e2 = seg.coeff2 * np.exp(seg.lambda2 * tt)
            v_n[sel] = seg.offset[0] + e1 * seg.vec1[0] + e2 * seg.vec2[0]
            v_o[sel] = seg.offset[1] + e1 * seg.vec1[1] + e2 * seg.vec2[1]
        return v_n, v_o

    def windows(self, horizon: float) -> Iterable[tuple[float, float, AnalyticTrajectory]]:
        """(start, end, segment) for every segment clipped to [0, horizon]."""
        ends = self.starts[1:] + (max(horizon, self.starts[-1]),)
        for start, end, seg in zip(self.starts, ends, self.segments):
            if start >= horizon:
                break
            yield start, min(end, horizon), seg

    def crossings(self, v_target: float, horizon: float) -> list[tuple[float, Direction]]:
        out: list[tuple[float, Direction]] = []
        for start, end, seg in self.windows(horizon):
            if end <= start:
                continue
            for t, d in crossings(seg, v_target, (0.0, end - start)):
                t_abs = start + t
                if out and (out[-1][1] == d):
                    continue  # already on this side, e.g. re-touch after a switch
                if out and t_abs <= out[-1][0]:
                    out.pop()
                    continue
                out.append((t_abs, d))
        return out

    def threshold_crossing(self, v_target: float, direction: Direction,
                           horizon: float, t_from: float = 0.0) -> float | None:
        for start, end, seg in self.windows(horizon):
            lo = max(start, t_from)
            if end <= lo:
                continue
            t = threshold_crossing(seg, v_target, direction, (lo - start, end - start))
            if t is not None:
                return start + t
        return None


def chain(params: GateParams, init: StateVector,
          schedule: Sequence[tuple[float, Mode]]) -> PiecewiseTrajectory:
    """Switch modes at the scheduled times, carrying (V_N, V_O) across every switch."""
    if not schedule:
        raise ValueError("schedule must contain at least one segment")
    times = [float(t) for t, _ in schedule]
    if times[0] != 0.0:
        raise ValueError("first segment must start at t = 0")
    if any(not b > a for a, b in zip(times, times[1:])):
        raise ValueError("switch times must be strictly increasing")
    _check_finite(*times)
    segments = []
    state = StateVector(*init)
    for i, (t0, mode) in enumerate(schedule):
        if i > 0:
            state = eval_traj(segments[-1], t0 - times[i - 1])
        segments.append(solve_mode(params, mode, state))
    return PiecewiseTrajectory(tuple(times), tuple(segments))
