import math

import numpy as np
import pytest

from hybridnor import oracle
from hybridnor.lintraj import chain
from hybridnor.misdelay import falling_schedule, falling_trajectory
from hybridnor.oracle import IntegrationConfig, crossing_from_samples, integrate
from hybridnor.params import M01, M10, M11, TABLE_I, StateVector

P = TABLE_I
V = P.v_dd


def test_mode11_scalar_exponential():
    k = (1 / P.r3 + 1 / P.r4) / P.c_out
    cfg = IntegrationConfig(step=1 / k / 1000)
    s = integrate(P, [(0.0, M11)], StateVector(V, V), 5 / k, cfg)
    assert np.all(s.v_n == V)
    assert np.max(np.abs(s.v_o - V * np.exp(-k * s.t))) <= 1e-9 * V


def test_mode01_internal_node_charging():
    tau = P.c_int * P.r1
    s = integrate(P, [(0.0, M01)], StateVector(0.0, V), 10 * tau)
    assert np.max(np.abs(s.v_n - V * (1 - np.exp(-s.t / tau)))) <= 1e-9 * V


def test_step_limit_enforced():
    tau = oracle.min_time_constant(P, M10)
    with pytest.raises(ValueError, match="exceeds"):
        integrate(P, [(0.0, M10)], StateVector(V, V), 1e-11, IntegrationConfig(tau / 50))
    with pytest.raises(ValueError):
        IntegrationConfig(step=0.0)
    with pytest.raises(ValueError):
        IntegrationConfig(step=1e-15, method="euler")


def test_bad_schedules_rejected():
    with pytest.raises(ValueError):
        integrate(P, [(1e-12, M10)], StateVector(V, V), 1e-11)
    with pytest.raises(ValueError):
        integrate(P, [(0.0, M10), (0.0, M11)], StateVector(V, V), 1e-11)
    with pytest.raises(ValueError):
        integrate(P, [(0.0, M10)], StateVector(V, V), 0.0)


def test_switch_times_land_on_samples():
    sched = [(0.0, M10), (3.3e-12, M11), (7.77e-12, M01)]
    s = integrate(P, sched, StateVector(V, V), 2e-11)
    for t, _ in sched:
        assert np.any(s.t == t)
    assert s.t[-1] == 2e-11
    assert np.all(np.diff(s.t) > 0)


def test_jacobian_matches_rhs():
    for mode in (M10, M11):
        j = oracle.jacobian(P, mode)
        f0 = np.array(oracle.rhs(P, mode, 0.0, 0.0))
        x = np.array([0.3, 0.5])
        assert np.allclose(j @ x + f0, oracle.rhs(P, mode, *x), rtol=1e-12)


def test_crossing_from_samples_basics():
    assert crossing_from_samples([0, 1, 2], [V, V, V], V / 2, "falling") is None
    assert crossing_from_samples([0.0, 2.0], [1.0, 0.0], 0.25, "falling") == pytest.approx(1.5)
    assert crossing_from_samples([0.0, 2.0], [0.0, 1.0], 0.25, "rising") == pytest.approx(0.5)
    assert crossing_from_samples([0.0, 2.0], [0.0, 1.0], 0.25, "falling") is None
    with pytest.raises(ValueError):
        crossing_from_samples([0.0, 1.0], [0.0, 1.0], 0.5, "sideways")


def test_mode11_crossing_against_closed_form():
    k = (1 / P.r3 + 1 / P.r4) / P.c_out
    s = integrate(P, [(0.0, M11)], StateVector(V, V), 2 / k, IntegrationConfig(1 / k / 1000))
    tc = crossing_from_samples(s.t, s.v_o, V / 2, "falling")
    assert abs(tc - math.log(2) / k) <= 1e-15


@pytest.mark.parametrize("delta", [2e-10, 5e-12, -8e-12])
def test_falling_schedule_crossing_matches_analytic(delta):
    sched = falling_schedule(delta)
    s = integrate(P, sched, StateVector(V, V), 1e-10)
    tc = crossing_from_samples(s.t, s.v_o, P.v_th, "falling")
    exact = falling_trajectory(P, delta).threshold_crossing(P.v_th, "falling", 1e-10)
    assert abs(tc - exact) <= 1e-15


def test_step_halving_convergence():
    sched = falling_schedule(6e-12)
    modes = [m for _, m in sched]
    cfg = oracle.default_config(P, modes)
    a = integrate(P, sched, StateVector(V, V), 6e-11, cfg)
    b = integrate(P, sched, StateVector(V, V), 6e-11, IntegrationConfig(cfg.step / 2))
    ta = crossing_from_samples(a.t, a.v_o, P.v_th, "falling")
    tb = crossing_from_samples(b.t, b.v_o, P.v_th, "falling")
    assert abs(ta - tb) < 1e-16


def test_csv_dump(tmp_path):
    s = integrate(P, [(0.0, M10)], StateVector(V, V), 1e-12)
    s.to_csv(tmp_path / "s.csv")
    rows = (tmp_path / "s.csv").read_text().splitlines()
    assert rows[0] == "t,v_n,v_o"
    assert len(rows) == s.t.size + 1
    assert float(rows[-1].split(",")[2]) == s.v_o[-1]


def test_agrees_with_chain_on_long_schedule():
    sched = [(0.0, M10), (1e-11, M11), (2.5e-11, M01), (4e-11, M10)]
    init = StateVector(0.1, 0.7)
    s = integrate(P, sched, init, 8e-11)
    vn, vo = chain(P, init, sched).sample(s.t)
    assert max(np.abs(vn - s.v_n).max(), np.abs(vo - s.v_o).max()) <= 1e-6 * V
