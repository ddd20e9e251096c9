"""Characteristic Charlie delays: closed forms, tangent-line approximations, and fitting.

The six characteristic values are the falling and rising delays at
delta = -inf, 0, +inf, with +-inf represented by |delta| = 2e-10 s.  Exact
values come from ``misdelay``; the approximations below are first-order Taylor
expansions of the output trajectory around a fixed expansion time ``w`` and
are only as good as that linearization.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import misdelay
from .lintraj import DegenerateModeError, coupled_constants, eigenvalues
from .params import M00, M10, GateParams, ParameterError

log = logging.getLogger(__name__)

LN2 = math.log(2.0)
INF = misdelay.INF_PROXY


# -- closed forms ---------------------------------------------------------

def char_fall_zero(params: GateParams) -> float:
    """Falling delay for simultaneous inputs (excluding delta_min); exact."""
    p = params
    return -math.log(0.5) / (1.0 / (p.c_out * p.r3) + 1.0 / (p.c_out * p.r4))


def char_fall_minus_inf(params: GateParams) -> float:
    """Falling delay when B rises long before A (excluding delta_min); exact."""
    return -math.log(0.5) * params.c_out * params.r4


@dataclass(frozen=True)
class ApproxConstants:
    """Knobs of the tangent-line approximations.

    ``half`` and ``quarter`` are the literal voltage constants 0.6 and 0.3 of
    the reference formulas; ``d_cap`` is the capacitance written D in them (None
    means C_int).
    """

    half: float = 0.6
    quarter: float = 0.3
    w_fall: float = 1e-10
    w_rise_pos: float = 2e-10
    w_rise_neg: float = 1e-10
    d_cap: float | None = None


DEFAULT_APPROX = ApproxConstants()


def _tangent_delay(c1, c2, ab_p, ab_m, lam1, lam2, w, target):
    """Linearize v_o(t) = c1 ab_p e^{l1 t} + c2 ab_m e^{l2 t} (+const) at w; solve for target."""
    e1, e2 = math.exp(lam1 * w), math.exp(lam2 * w)
    den = c1 * ab_p * lam1 * e1 + c2 * ab_m * lam2 * e2
    return (target - c1 * ab_p * e1 * (1 - lam1 * w)) / den \
        - c2 * ab_m * e2 * (1 - lam2 * w) / den


def char_fall_plus_inf(params: GateParams, consts: ApproxConstants = DEFAULT_APPROX,
                       w: float | None = None) -> float:
    """Approximate falling delay when A rises long before B (excluding delta_min)."""
    p = params
    w = consts.w_fall if w is None else w
    alpha, beta, _ = coupled_constants(p, M10)
    lam1, lam2 = eigenvalues(p, M10)
    c2 = consts.half * ((alpha + beta) * p.c_int * p.r2 - 1) / beta
    c1 = p.v_dd * p.c_int * p.r2 - c2
    return _tangent_delay(c1, c2, alpha + beta, alpha - beta, lam1, lam2, w, consts.half)


@dataclass(frozen=True)
class _RiseConstants:
    alpha: float
    beta: float
    gamma: float
    lam1: float
    lam2: float
    l: float
    a: float
    b: float


def _rise_constants(params: GateParams) -> _RiseConstants:
    p = params
    alpha, beta, gamma = coupled_constants(p, M00)
    lam1, lam2 = eigenvalues(p, M00)
    gb = gamma * gamma - beta * beta
    l = p.v_dd * (beta * beta - alpha * alpha) * p.r2 / (p.r1 * gb)
    a = p.v_dd * (alpha + gamma) * (alpha + beta) / (p.c_int * p.r1 * gb)
    b = p.v_dd * (beta * beta - alpha * alpha) / (p.c_int * p.r1 * gb)
    return _RiseConstants(alpha, beta, gamma, lam1, lam2, l, a, b)


def vn_after_01(params: GateParams, delta: float, x: float) -> float:
    """V_N after charging through R1 for ``delta`` seconds from ``x``."""
    return params.v_dd + (x - params.v_dd) * math.exp(-delta / (params.c_int * params.r1))


def _g2(params: GateParams, x: float, consts: ApproxConstants, d_cap: float) -> float:
    xx, yy, _ = coupled_constants(params, M10)
    v = params.v_dd
    if math.isclose(x, 0.0, abs_tol=1e-12 * v):
        return 0.0
    if math.isclose(x, v, rel_tol=1e-12):
        return consts.half * (xx + yy) * d_cap * params.r2 / yy
    if math.isclose(x, v / 2, rel_tol=1e-12):
        return consts.quarter * (xx + yy) * d_cap * params.r2 / yy
    raise ValueError("initial V_N must be one of 0, v_dd/2, v_dd for delta < 0")


def char_rise(params: GateParams, delta: float, vn_policy: float = 0.0,
              consts: ApproxConstants = DEFAULT_APPROX, w: float | None = None) -> float:
    """Approximate rising delay for separation ``delta`` (excluding delta_min)."""
    p = params
    rc = _rise_constants(p)
    al, be = rc.alpha, rc.beta
    cr2 = p.c_int * p.r2
    if delta >= 0:
        w = consts.w_rise_pos if w is None else w
        vn = vn_after_01(p, delta, vn_policy)
        bracket = (al + be) * vn
        shift = delta
    else:
        w = consts.w_rise_neg if w is None else w
        d_cap = p.c_int if consts.d_cap is None else consts.d_cap
        x, y, _ = coupled_constants(p, M10)
        z = -(p.c_out * p.r3 + d_cap * (p.r2 + p.r3)) / (2 * p.c_out * p.c_int * p.r2 * p.r3)
        g2 = _g2(p, vn_policy, consts, d_cap)
        g1 = (y - x) * g2 / (x + y)
        s = abs(delta)
        vn = g1 / cr2 * math.exp((z + y) * s) + g2 / cr2 * math.exp((z - y) * s)
        vo = g1 * (x + y) * math.exp((z + y) * s) + g2 * (x - y) * math.exp((z - y) * s)
        bracket = (al + be) * vn - vo / cr2
        shift = s
    c2 = (bracket + rc.a + rc.b) * cr2 / (2 * be * math.exp(rc.lam2 * shift))
    # c1 uses the delta-dependent c2 computed above
    c1 = ((al + be) * vn - c2 * (al + be) / cr2 * math.exp(rc.lam2 * shift) + rc.a) * cr2 \
        / ((al + be) * math.exp(rc.lam1 * shift))
    return _tangent_delay(c1, c2, al + be, al - be, rc.lam1, rc.lam2, w,
                          consts.half - rc.l) - shift


# -- exact characteristic delays ----------------------------------------------

TARGET_NAMES = ("d_fall_minus_inf", "d_fall_zero", "d_fall_plus_inf",
                "d_rise_minus_inf", "d_rise_zero", "d_rise_plus_inf")


@dataclass(frozen=True)
class CharacteristicDelays:
    """The six characteristic delays in seconds; ``None`` marks an untargeted value."""

    d_fall_minus_inf: float | None = None
    d_fall_zero: float | None = None
    d_fall_plus_inf: float | None = None
    d_rise_minus_inf: float | None = None
    d_rise_zero: float | None = None
    d_rise_plus_inf: float | None = None

    def __post_init__(self):
        for name in TARGET_NAMES:
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite")

    def as_tuple(self) -> tuple[float | None, ...]:
        return tuple(getattr(self, n) for n in TARGET_NAMES)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def characteristic_delays(params: GateParams, vn_policy: float = 0.0) -> CharacteristicDelays:
    """Exact model values (delta_min included) via the misdelay trajectories."""
    return CharacteristicDelays(
        misdelay.delay_falling(params, -INF),
        misdelay.delay_falling(params, 0.0),
        misdelay.delay_falling(params, INF),
        misdelay.delay_rising(params, -INF, vn_policy),
        misdelay.delay_rising(params, 0.0, vn_policy),
        misdelay.delay_rising(params, INF, vn_policy),
    )


def load_targets(path: str | Path) -> tuple[CharacteristicDelays, float | None]:
    """Targets JSON: the six delays (seconds, any subset) plus optional ``delta_min``."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    delta_min = data.pop("delta_min", None)
    unknown = set(data) - set(TARGET_NAMES)
    if unknown:
        raise ParameterError(f"unknown target keys: {sorted(unknown)}")
    return CharacteristicDelays(**{k: float(v) for k, v in data.items()}), \
        None if delta_min is None else float(delta_min)


# -- fitting ------------------------------------------------------------------

@dataclass
class FitConfig:
    """Weights, log-space bounds and optimizer settings.

    The R4/R3 ratio is bounded separately: both are nMOS on-resistances and
    should be comparable, which is exactly what makes some target sets
    unreachable without a pure delay.
    """

    weights: tuple[float, ...] = (1.0,) * 6
    r_bounds: tuple[float, float] = (1e3, 1e6)
    r34_ratio: tuple[float, float] = (0.5, 2.0)
    c_int_bounds: tuple[float, float] = (1e-19, 1e-15)
    c_out_bounds: tuple[float, float] = (1e-17, 1e-14)
    delta_min: float | None = 0.0  # None: fitted as a seventh variable
    delta_min_bounds: tuple[float, float] = (0.0, 50e-12)
    vn_policy: float = 0.0
    v_dd: float = 0.8
    max_iter: int = 4000
    tol: float = 1e-10  # objective tolerance, ps^2
    grid_levels: int = 3
    n_starts: int = 3
    match_tol: float = 0.1e-12

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != 6 or any(x < 0 for x in w) or not any(x > 0 for x in w):
            raise ValueError("weights: six non-negative values, not all zero")
        self.weights = w
        for name in ("r_bounds", "r34_ratio", "c_int_bounds", "c_out_bounds"):
            lo, hi = getattr(self, name)
            if not 0 < lo < hi:
                raise ValueError(f"{name} must satisfy 0 < lo < hi")
        lo, hi = self.delta_min_bounds
        if not 0 <= lo <= hi:
            raise ValueError("delta_min_bounds must satisfy 0 <= lo <= hi")

    @classmethod
    def from_dict(cls, data: dict) -> FitConfig:
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown fit config keys: {sorted(unknown)}")
        kw = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        return cls(**kw)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FitResult:
    params: GateParams
    model: CharacteristicDelays
    residuals: dict[str, float]
    objective: float
    feasible: bool
    diagnostics: list[str] = field(default_factory=list)
    history: list[float] = field(default_factory=list)
    n_evals: int = 0

    def write_residuals(self, path: str | Path, targets: CharacteristicDelays) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["target", "target_s", "model_s", "residual_s"])
            for name in TARGET_NAMES:
                t = getattr(targets, name)
                if t is None:
                    continue
                w.writerow([name, repr(t), repr(getattr(self.model, name)),
                            repr(self.residuals[name])])


def ratio_diagnostics(targets: CharacteristicDelays, cfg: FitConfig) -> list[str]:
    """Check the exact law  d(-inf)/d(0) = (R3 + R4)/R3  (pure delay removed)."""
    d_minus, d_zero = targets.d_fall_minus_inf, targets.d_fall_zero
    if d_minus is None or d_zero is None:
        return []
    if cfg.delta_min is None:
        candidates = np.linspace(*cfg.delta_min_bounds, 201)
    else:
        candidates = np.array([cfg.delta_min])
    lo, hi = cfg.r34_ratio
    best = None
    for dm in candidates:
        if dm >= d_zero:
            continue
        need = (d_minus - dm) / (d_zero - dm) - 1.0  # required R4/R3
        if lo <= need <= hi:
            return []
        best = need if best is None or abs(math.log(max(need, 1e-12))) < abs(
            math.log(max(best, 1e-12))) else best
    ratio_lo, ratio_hi = 1 + lo, 1 + hi
    dm_txt = ("any delta_min in bounds" if cfg.delta_min is None
              else f"delta_min={cfg.delta_min * 1e12:g} ps")
    got = (d_minus - (cfg.delta_min or 0.0)) / (d_zero - (cfg.delta_min or 0.0)) \
        if cfg.delta_min is not None and cfg.delta_min < d_zero else float("nan")
    return [
        f"infeasible: d_fall(-inf)/d_fall(0) must equal (R3+R4)/R3 in "
        f"[{ratio_lo:g}, {ratio_hi:g}] for R4/R3 in [{lo:g}, {hi:g}]; targets give "
        f"{got:.4g} with {dm_txt} (required R4/R3 = {best if best is not None else float('nan'):.4g}); "
        "the two falling values cannot be matched simultaneously"
    ]


class _Problem:
    """Maps a box-bounded vector to GateParams and evaluates the weighted objective."""

    def __init__(self, targets: CharacteristicDelays, cfg: FitConfig):
        self.targets = targets.as_tuple()
        self.cfg = cfg
        self.fit_dmin = cfg.delta_min is None
        r_lo, r_hi = np.log(cfg.r_bounds)
        q_lo, q_hi = np.log(cfg.r34_ratio)
        self.bounds = [(r_lo, r_hi), (r_lo, r_hi), (r_lo, r_hi), (q_lo, q_hi),
                       tuple(np.log(cfg.c_int_bounds)), tuple(np.log(cfg.c_out_bounds))]
        if self.fit_dmin:
            self.bounds.append(tuple(x * 1e12 for x in cfg.delta_min_bounds))
        self.n_evals = 0
        self.best = math.inf
        self.best_x = None
        self.evals_best: list[float] = []

    def to_params(self, x: Sequence[float]) -> GateParams:
        x = np.clip(x, [b[0] for b in self.bounds], [b[1] for b in self.bounds])
        r1, r2, r3 = np.exp(x[:3])
        r4 = r3 * math.exp(x[3])
        dmin = x[6] * 1e-12 if self.fit_dmin else self.cfg.delta_min
        return GateParams(float(r1), float(r2), float(r3), float(r4),
                          float(math.exp(x[4])), float(math.exp(x[5])),
                          v_dd=self.cfg.v_dd, delta_min=float(dmin))

    def model(self, params: GateParams) -> tuple[float, ...]:
        out = []
        for name, target in zip(TARGET_NAMES, self.targets):
            if target is None:
                out.append(math.nan)
                continue
            polarity = "falling" if "fall" in name else "rising"
            delta = -INF if "minus" in name else (INF if "plus" in name else 0.0)
            out.append(misdelay.delay(params, polarity, delta, self.cfg.vn_policy))
        return tuple(out)

    def __call__(self, x) -> float:
        self.n_evals += 1
        try:
            vals = self.model(self.to_params(x))
        except (misdelay.DelayError, DegenerateModeError, ParameterError):
            value = 1e12
        else:
            value = 0.0
            for wgt, v, t in zip(self.cfg.weights, vals, self.targets):
                if t is not None and wgt > 0:
                    value += wgt * ((v - t) * 1e12) ** 2
        if value < self.best:
            self.best, self.best_x = value, np.array(x, dtype=float)
        self.evals_best.append(self.best)
        return value


def fit(targets: CharacteristicDelays, cfg: FitConfig | None = None) -> FitResult:
    """Least-squares fit of GateParams to the targeted characteristic delays.

    Coarse log grid over the bound box, then bounded Nelder-Mead from the best
    ``n_starts`` grid points.  Model values always use the exact delays.
    """
    cfg = cfg or FitConfig()
    if cfg.delta_min is not None:
        for name, t in zip(TARGET_NAMES, targets.as_tuple()):
            if t is not None and t <= cfg.delta_min:
                raise ValueError(f"target {name} does not exceed the fixed delta_min")
    prob = _Problem(targets, cfg)
    levels = [np.linspace(lo, hi, cfg.grid_levels + 2)[1:-1] for lo, hi in prob.bounds]
    scored = []
    for x in itertools.product(*levels):
        scored.append((prob(np.array(x)), x))
    scored.sort(key=lambda s: s[0])
    history: list[float] = []

    def record(xk):
        history.append(prob.best)

    for _, x0 in scored[:cfg.n_starts]:
        minimize(prob, np.array(x0), method="Nelder-Mead", bounds=prob.bounds,
                 callback=record,
                 options=dict(maxiter=cfg.max_iter, maxfev=4 * cfg.max_iter,
                              fatol=cfg.tol, xatol=1e-10, adaptive=True))
    # polish from the overall best
    minimize(prob, prob.best_x, method="Nelder-Mead", bounds=prob.bounds, callback=record,
             options=dict(maxiter=cfg.max_iter, maxfev=4 * cfg.max_iter,
                          fatol=cfg.tol, xatol=1e-12, adaptive=True))

    params = prob.to_params(prob.best_x)
    model = CharacteristicDelays(*[None if math.isnan(v) else v for v in prob.model(params)])
    residuals = {n: getattr(model, n) - t
                 for n, t in zip(TARGET_NAMES, targets.as_tuple()) if t is not None}
    diagnostics = ratio_diagnostics(targets, cfg)
    worst = max(abs(r) for r in residuals.values())
    if worst > cfg.match_tol:
        diagnostics.append(
            f"residual floor: worst |residual| = {worst * 1e12:.4g} ps exceeds "
            f"{cfg.match_tol * 1e12:g} ps")
    feasible = not diagnostics
    for msg in diagnostics:
        log.warning(msg)
    return FitResult(params, model, residuals, prob.best, feasible, diagnostics,
                     history, prob.n_evals)
