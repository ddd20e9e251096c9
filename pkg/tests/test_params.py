import json

import pytest
from hypothesis import given

from hybridnor.params import (M00, M01, M10, M11, MODES, TABLE_I, GateParams, Mode,
                              ParameterError, steady_state)

from conftest import gate_params


def test_default_threshold_is_half_supply():
    p = GateParams(1e4, 1e4, 1e4, 1e4, 1e-16, 1e-15, v_dd=1.2)
    assert p.v_th == pytest.approx(0.6)


@pytest.mark.parametrize("bad", [
    dict(r1=0.0), dict(c_int=-1e-16), dict(v_dd=0.0), dict(v_th=0.8), dict(v_th=0.0),
    dict(delta_min=-1e-12), dict(r2=float("nan")), dict(c_out=float("inf")),
])
def test_invalid_parameters_rejected(bad):
    base = TABLE_I.to_dict()
    base.update(bad)
    with pytest.raises(ParameterError):
        GateParams.from_dict(base)


def test_unknown_and_missing_keys():
    d = TABLE_I.to_dict()
    with pytest.raises(ParameterError, match="unknown"):
        GateParams.from_dict({**d, "r5": 1.0})
    del d["r3"]
    with pytest.raises(ParameterError, match="missing"):
        GateParams.from_dict(d)


@given(gate_params())
def test_json_round_trip(p):
    assert GateParams.from_json(p.to_json()) == p


def test_file_round_trip_and_parse_error(tmp_path):
    path = tmp_path / "p.json"
    TABLE_I.save(path)
    assert set(json.loads(path.read_text())) == {
        "r1", "r2", "r3", "r4", "c_int", "c_out", "v_dd", "v_th", "delta_min"}
    assert GateParams.load(path) == TABLE_I
    path.write_text('{\n  "r1": 1e4,\n  oops\n}')
    with pytest.raises(ParameterError, match="line 3"):
        GateParams.load(path)


def test_mode_parse_and_str():
    assert [str(m) for m in MODES] == ["00", "01", "10", "11"]
    assert Mode.parse("10") == M10
    for bad in ("2", "012", "ab", ""):
        with pytest.raises(ValueError):
            Mode.parse(bad)


def test_steady_states():
    v = TABLE_I.v_dd
    assert steady_state(TABLE_I, M00) == (v, v)
    assert steady_state(TABLE_I, M01) == (v, 0.0)
    assert steady_state(TABLE_I, M10) == (0.0, 0.0)
    assert steady_state(TABLE_I, M11, 0.3) == (0.3, 0.0)
