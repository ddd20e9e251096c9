"""Command-line front end: trajectory, delay-sweep, characteristic, fit, simulate, compare.

Every run writes ``manifest.json`` plus CSV artifacts into ``--out``.
Exit codes: 0 success, 2 usage error, 3 input/parse error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import charliefit, misdelay, oracle
from .lintraj import DegenerateModeError, chain
from .params import TABLE_I, GateParams, Mode, ParameterError, StateVector
from .simkit import (ChannelModel, HorizonError, NormalizationError,
                     TraceFormatError, TraceGenConfig, apply_channel, compare_models,
                     exp_channel_for, generate_traces, inertial_for, oracle_reference)
from .simkit.channels import settle_horizon

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("hybridnor")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


# -- helpers ---------------------------------------------------------------------

def _load_params(path: str | None) -> GateParams:
    if path is None:
        return TABLE_I
    try:
        return GateParams.load(path)
    except ParameterError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _load_json(path: str | None, default):
    if path is None:
        return default
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(str(exc)) from exc


def parse_schedule(text: str) -> list[tuple[float, Mode]]:
    """``"0:10,2e-11:11"`` -> [(0.0, Mode 10), (2e-11, Mode 11)]."""
    sched = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            t, m = item.split(":")
            sched.append((float(t), Mode.parse(m)))
        except ValueError as exc:
            raise UsageError(f"bad schedule entry {item!r}: expected TIME:MODE") from exc
    if not sched:
        raise UsageError("schedule is empty")
    return sched


def parse_grid(text: str) -> list[float]:
    """Comma list of seconds, or ``start:stop:n`` for n evenly spaced points."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, n = text.split(":")
            n = int(n)
            if n < 1:
                raise ValueError("n must be >= 1")
            grid = np.linspace(float(start), float(stop), n)
            if n > 1:  # land exactly on delta = 0 despite roundoff
                grid[np.abs(grid) < 1e-9 * abs(grid[1] - grid[0])] = 0.0
            vals = grid.tolist()
        else:
            vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad delta grid {text!r}: {exc}") from exc
    if not vals:
        raise UsageError("delta grid is empty")
    return vals


def parse_vn(text: str, params: GateParams) -> float:
    named = {"gnd": 0.0, "half": params.v_dd / 2, "vdd": params.v_dd}
    if text.lower() in named:
        return named[text.lower()]
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"bad V_N policy {text!r}") from exc


def _write_manifest(out: Path, subcommand: str, inputs: dict, seed, config: dict) -> None:
    manifest = {"subcommand": subcommand, "inputs": inputs, "out": str(out), "seed": seed,
                "config": config}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


# -- subcommands -------------------------------------------------------------------

def cmd_trajectory(args) -> int:
    params = _load_params(args.params)
    sched = parse_schedule(args.schedule)
    if args.init:
        try:
            init = StateVector(*(float(v) for v in args.init.split(",")))
        except (TypeError, ValueError) as exc:
            raise UsageError("--init expects V_N,V_O") from exc
    else:
        init = StateVector(params.v_dd, params.v_dd)
    if not args.horizon > 0 or args.samples < 2:
        raise UsageError("need --horizon > 0 and --samples >= 2")
    try:
        traj = chain(params, init, sched)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ts = np.linspace(0.0, args.horizon, args.samples)
    ana_n, ana_o = traj.sample(ts)
    out = _outdir(args.out)
    cols = ["t", "v_n", "v_o"]
    data = [ts, ana_n, ana_o]
    summary = {}
    if args.oracle:
        s = oracle.integrate(params, sched, init, args.horizon,
                             oracle.default_config(params, [m for _, m in sched]))
        ex_n, ex_o = traj.sample(s.t)
        dev = float(max(np.abs(ex_n - s.v_n).max(), np.abs(ex_o - s.v_o).max()))
        summary = {"oracle_max_deviation_v": dev, "oracle_samples": int(s.t.size),
                   "oracle_step_s": float(s.t[1] - s.t[0]) if s.t.size > 1 else 0.0}
        cols += ["v_n_oracle", "v_o_oracle"]
        data += [np.interp(ts, s.t, s.v_n), np.interp(ts, s.t, s.v_o)]
        print(f"oracle max deviation: {dev:.3e} V ({dev / params.v_dd:.3e} V_DD)")
    with open(out / "trajectory.csv", "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in zip(*data):
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    _write_manifest(out, "trajectory", {"params": args.params}, None, {
        "params": params.to_dict(), "schedule": [[t, str(m)] for t, m in sched],
        "init": list(init), "horizon": args.horizon, "samples": args.samples,
        "oracle": bool(args.oracle), **summary})
    return EXIT_OK


def cmd_delay_sweep(args) -> int:
    params = _load_params(args.params)
    grid = parse_grid(args.grid)
    vn = parse_vn(args.vn, params)
    try:
        curve = misdelay.delay_curve(params, args.polarity, vn, grid, args.horizon)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = _outdir(args.out)
    curve.to_csv(out / "delay_curve.csv")
    i = int(np.argmin(curve.delays))
    print(f"{args.polarity} delay: min {curve.delays[i] * 1e12:.4f} ps at "
          f"delta = {curve.deltas[i] * 1e12:.4f} ps")
    _write_manifest(out, "delay-sweep", {"params": args.params}, None, {
        "params": params.to_dict(), "polarity": args.polarity, "vn_policy": vn,
        "grid": grid, "horizon": args.horizon})
    return EXIT_OK


def cmd_characteristic(args) -> int:
    params = _load_params(args.params)
    vn = parse_vn(args.vn, params)
    try:
        consts = charliefit.ApproxConstants(**_load_json(args.approx, {}))
    except TypeError as exc:
        raise InputError(f"approximation constants: {exc}") from exc
    exact = charliefit.characteristic_delays(params, vn)
    dmin = params.delta_min
    inf = misdelay.INF_PROXY
    approx = {
        "d_fall_minus_inf": charliefit.char_fall_minus_inf(params),
        "d_fall_zero": charliefit.char_fall_zero(params),
        "d_fall_plus_inf": charliefit.char_fall_plus_inf(params, consts),
        "d_rise_plus_inf": charliefit.char_rise(params, inf, vn, consts),
    }
    try:
        approx["d_rise_minus_inf"] = charliefit.char_rise(params, -inf, vn, consts)
    except ValueError:
        pass
    out = _outdir(args.out)
    rows = []
    with open(out / "characteristic.csv", "w") as fh:
        fh.write("name,exact_s,formula_s,abs_error_s\n")
        for name in charliefit.TARGET_NAMES:
            e = getattr(exact, name)
            f = approx.get(name)
            f_tot = None if f is None else f + dmin
            err = None if f_tot is None else abs(f_tot - e)
            rows.append((name, e, f_tot, err))
            fh.write(",".join([name, _fmt(e), "" if f_tot is None else _fmt(f_tot),
                               "" if err is None else _fmt(err)]) + "\n")
    for name, e, f, err in rows:
        extra = "" if f is None else f"  formula {f * 1e12:10.4f} ps  |err| {err * 1e12:.4g} ps"
        print(f"{name:<18} exact {e * 1e12:10.4f} ps{extra}")
    _write_manifest(out, "characteristic", {"params": args.params, "approx": args.approx}, None,
                    {"params": params.to_dict(), "vn_policy": vn, "approx": asdict(consts)})
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        targets, dmin = charliefit.load_targets(args.targets)
    except (OSError, ParameterError, TypeError) as exc:
        raise InputError(f"{args.targets}: {exc}") from exc
    cfg_data = _load_json(args.config, {})
    if dmin is not None:
        cfg_data["delta_min"] = dmin
    try:
        cfg = charliefit.FitConfig.from_dict(cfg_data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"fit config: {exc}") from exc
    try:
        result = charliefit.fit(targets, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = _outdir(args.out)
    result.params.save(out / "params.json")
    result.write_residuals(out / "residuals.csv", targets)
    for name, r in result.residuals.items():
        print(f"{name:<18} residual {r * 1e12:+.4g} ps")
    for msg in result.diagnostics:
        print(f"diagnostic: {msg}")
    _write_manifest(out, "fit", {"targets": args.targets, "config": args.config}, None, {
        "targets": targets.to_dict(), "fit_config": cfg.to_dict(),
        "feasible": result.feasible, "diagnostics": result.diagnostics,
        "objective_ps2": result.objective, "evaluations": result.n_evals})
    return EXIT_OK


def _tracegen(args) -> TraceGenConfig:
    data = _load_json(args.tracegen, {})
    for key in ("mu", "sigma", "count", "scope"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if args.seed is not None:
        data["seed"] = args.seed
    try:
        return TraceGenConfig(**data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"trace generation config: {exc}") from exc


def resolve_channels(params: GateParams, entries) -> list[ChannelModel]:
    """Channel list from JSON; omitted parameters are derived from ``params``."""
    if entries is None:
        entries = [{"variant": "hybrid_nor", "name": "hybrid"},
                {"variant": "hybrid_nor", "name": "hybrid_no_dmin", "delta_min": 0.0},
                {"variant": "exp_involution", "delta_min": 20e-12},
                {"variant": "inertial"}]
    if not isinstance(entries, list) or not entries:
        raise InputError("channels config must be a non-empty JSON list")
    out = []
    for item in entries:
        item = dict(item)
        variant = item.get("variant")
        name = item.get("name", variant)
        try:
            if variant == "hybrid_nor":
                p = GateParams.from_dict(item["params"]) if "params" in item else params
                if "delta_min" in item:
                    p = p.with_(delta_min=float(item["delta_min"]))
                out.append(ChannelModel.hybrid(p, float(item.get("vn_init", 0.0)), name=name))
            elif variant == "exp_involution" and "tau_rise" not in item:
                ch = exp_channel_for(params, float(item.get("delta_min", 20e-12)))
                out.append(ChannelModel.from_dict({**ch.to_dict(), "name": name}))
            elif variant == "inertial" and "delay" not in item:
                ch = inertial_for(params, threshold=item.get("threshold"))
                out.append(ChannelModel.from_dict({**ch.to_dict(), "name": name}))
            else:
                out.append(ChannelModel.from_dict({**item, "name": name}))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"channel {item!r}: {exc}") from exc
    return out


def cmd_simulate(args) -> int:
    params = _load_params(args.params)
    cfg = _tracegen(args)
    channels = resolve_channels(params, _load_json(args.channels, None))
    a, b = generate_traces(cfg, 2)
    out = _outdir(args.out)
    a.to_csv(out / "input_a.csv")
    b.to_csv(out / "input_b.csv")
    for ch in channels:
        apply_channel(ch, a, b).to_csv(out / f"out_{ch.name}.csv")
    if args.oracle:
        last = max(a.transitions[-1], b.transitions[-1])
        oracle_reference(params, a, b, last + settle_horizon(params)).to_csv(
            out / "out_reference.csv")
    print(f"simulated {len(a) + len(b)} input transitions through {len(channels)} channels")
    _write_manifest(out, "simulate", {"params": args.params, "channels": args.channels,
                                      "tracegen": args.tracegen}, cfg.seed, {
        "params": params.to_dict(), "tracegen": asdict(cfg),
        "channels": [c.to_dict() for c in channels], "oracle": bool(args.oracle)})
    return EXIT_OK


def cmd_compare(args) -> int:
    params = _load_params(args.params)
    cfg = _tracegen(args)
    channels = resolve_channels(params, _load_json(args.channels, None))
    if args.reference == "oracle":
        reference = "oracle"
    else:
        match = [c for c in channels if c.name == args.reference]
        if not match:
            raise UsageError(f"reference channel {args.reference!r} not among channels")
        reference = match[0]
    try:
        report = compare_models(params, channels, cfg, reference, args.repetitions,
                                normalize=args.normalize)
    except NormalizationError as exc:
        raise UsageError(str(exc)) from exc
    out = _outdir(args.out)
    report.to_csv(out / "report.csv")
    print(report.table())
    _write_manifest(out, "compare", {"params": args.params, "channels": args.channels,
                                     "tracegen": args.tracegen}, cfg.seed, {
        "params": params.to_dict(), "tracegen": asdict(cfg),
        "channels": [c.to_dict() for c in channels], "reference": args.reference,
        "repetitions": args.repetitions, "normalize": args.normalize})
    return EXIT_OK


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridnor", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--params", help="GateParams JSON (default: built-in 15 nm set)")
        p.add_argument("--out", required=True, help="output directory")
        if seed:
            p.add_argument("--seed", type=int, help="trace seed (overrides config)")

    p = sub.add_parser("trajectory", help="analytic (and oracle) V_N, V_O samples")
    common(p)
    p.add_argument("--schedule", required=True, help='e.g. "0:10,2e-11:11"')
    p.add_argument("--init", help="V_N,V_O at t = 0 (default V_DD,V_DD)")
    p.add_argument("--horizon", type=float, default=1e-10)
    p.add_argument("--samples", type=int, default=501)
    p.add_argument("--oracle", action="store_true", help="add RK4 columns and deviation")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("delay-sweep", help="MIS delay curve over delta")
    common(p)
    p.add_argument("--polarity", choices=("falling", "rising"), required=True)
    p.add_argument("--vn", default="gnd", help="initial V_N: gnd|half|vdd|volts")
    p.add_argument("--grid", required=True, help='"start:stop:n" or comma list (seconds)')
    p.add_argument("--horizon", type=float, default=misdelay.DEFAULT_HORIZON)
    p.set_defaults(func=cmd_delay_sweep)

    p = sub.add_parser("characteristic", help="exact vs formula characteristic delays")
    common(p)
    p.add_argument("--vn", default="gnd")
    p.add_argument("--approx", help="JSON overrides for the approximation constants")
    p.set_defaults(func=cmd_characteristic)

    p = sub.add_parser("fit", help="fit GateParams to characteristic delays")
    p.add_argument("--targets", required=True)
    p.add_argument("--config", help="FitConfig JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    for name, func, help_ in (("simulate", cmd_simulate, "run channels on random traces"),
                              ("compare", cmd_compare, "deviation-area model comparison")):
        p = sub.add_parser(name, help=help_)
        common(p, seed=True)
        p.add_argument("--channels", help="channel list JSON")
        p.add_argument("--tracegen", help="TraceGenConfig JSON")
        p.add_argument("--mu", type=float)
        p.add_argument("--sigma", type=float)
        p.add_argument("--count", type=int)
        p.add_argument("--scope", choices=("LOCAL", "GLOBAL"))
        if name == "simulate":
            p.add_argument("--oracle", action="store_true", help="also write the RK4 reference")
        else:
            p.add_argument("--repetitions", type=int, default=20)
            p.add_argument("--reference", default="oracle", help="'oracle' or a channel name")
            p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True)
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, TraceFormatError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (misdelay.DelayError, DegenerateModeError, HorizonError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
