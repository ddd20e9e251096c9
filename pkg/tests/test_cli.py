import csv
import json

import numpy as np
import pytest

from hybridnor.cli import EXIT_NUMERIC, EXIT_OK, EXIT_PARSE, EXIT_USAGE, main, parse_grid
from hybridnor.params import TABLE_I, GateParams
from hybridnor.simkit import DigitalTrace

V = TABLE_I.v_dd


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_trajectory_mode11_decay_with_oracle(tmp_path, capsys):
    out = tmp_path / "t"
    rc = main(["trajectory", "--schedule", "0:11", "--init", f"{V / 2},{V}",
               "--horizon", "1e-10", "--samples", "101", "--oracle", "--out", str(out)])
    assert rc == EXIT_OK
    rows = _rows(out / "trajectory.csv")
    assert list(rows[0]) == ["t", "v_n", "v_o", "v_n_oracle", "v_o_oracle"]
    v_o = np.array([float(r["v_o"]) for r in rows])
    assert np.all(np.diff(v_o) < 0)
    assert all(float(r["v_n"]) == V / 2 for r in rows)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "trajectory"
    assert manifest["config"]["oracle_max_deviation_v"] <= 1e-6 * V
    assert "oracle max deviation" in capsys.readouterr().out


def test_delay_sweep_falling(tmp_path):
    out = tmp_path / "d"
    assert main(["delay-sweep", "--polarity", "falling", "--grid=-2e-10:2e-10:41",
                 "--out", str(out)]) == EXIT_OK
    rows = _rows(out / "delay_curve.csv")
    d = np.array([float(r["delay_s"]) for r in rows])
    deltas = np.array([float(r["delta_s"]) for r in rows])
    assert deltas[np.argmin(d)] == 0.0
    assert d.min() == pytest.approx(28e-12, abs=1.5e-12)


def test_characteristic(tmp_path):
    out = tmp_path / "c"
    assert main(["characteristic", "--out", str(out)]) == EXIT_OK
    rows = {r["name"]: r for r in _rows(out / "characteristic.csv")}
    assert len(rows) == 6
    assert float(rows["d_fall_zero"]["abs_error_s"]) < 1e-15
    assert rows["d_rise_zero"]["formula_s"] == ""


def test_fit_writes_params_and_residuals(tmp_path):
    targets = tmp_path / "targets.json"
    targets.write_text(json.dumps({"d_fall_minus_inf": 38e-12, "d_fall_zero": 28e-12,
                                   "delta_min": 18e-12}))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid_levels": 2, "n_starts": 1}))
    out = tmp_path / "f"
    assert main(["fit", "--targets", str(targets), "--config", str(cfg),
                 "--out", str(out)]) == EXIT_OK
    p = GateParams.load(out / "params.json")
    assert p.delta_min == 18e-12
    assert len(_rows(out / "residuals.csv")) == 2
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["feasible"] is True


def test_simulate_outputs_valid_traces(tmp_path):
    out = tmp_path / "s"
    assert main(["simulate", "--count", "30", "--seed", "1", "--oracle", "--out", str(out)]) == 0
    for name in ("input_a", "input_b", "out_hybrid", "out_inertial", "out_exp_involution",
                 "out_reference"):
        DigitalTrace.from_csv(out / f"{name}.csv")
    assert json.loads((out / "manifest.json").read_text())["seed"] == 1


def test_compare_normalization(tmp_path):
    out = tmp_path / "c"
    assert main(["compare", "--count", "40", "--repetitions", "2", "--out", str(out)]) == 0
    rows = {r["channel"]: r for r in _rows(out / "report.csv")}
    assert float(rows["inertial"]["normalized"]) == 1.0


def test_compare_without_inertial_is_an_error(tmp_path, capsys):
    chans = tmp_path / "ch.json"
    chans.write_text(json.dumps([{"variant": "hybrid_nor"}]))
    rc = main(["compare", "--channels", str(chans), "--count", "20", "--repetitions", "1",
               "--out", str(tmp_path / "c")])
    assert rc == EXIT_USAGE
    assert "inertial" in capsys.readouterr().err


def test_exit_codes(tmp_path):
    out = str(tmp_path / "x")
    assert main(["trajectory", "--schedule", "", "--out", out]) == EXIT_USAGE
    assert main(["delay-sweep", "--polarity", "falling", "--grid", "", "--out", out]) == EXIT_USAGE
    assert main(["nonsense"]) == EXIT_USAGE
    bad = tmp_path / "p.json"
    bad.write_text('{\n  "r1": 1e4,\n')
    assert main(["characteristic", "--params", str(bad), "--out", out]) == EXIT_PARSE
    bad.write_text(json.dumps({**TABLE_I.to_dict(), "r1": -1.0}))
    assert main(["characteristic", "--params", str(bad), "--out", out]) == EXIT_PARSE
    assert main(["delay-sweep", "--polarity", "falling", "--grid", "0", "--horizon", "1e-14",
                 "--out", out]) == EXIT_NUMERIC


def test_parse_grid():
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("1e-12, 2e-12") == [1e-12, 2e-12]
    from hybridnor.cli import UsageError
    for bad in ("", "0:1", "a,b", "0:1:0"):
        with pytest.raises(UsageError):
            parse_grid(bad)
