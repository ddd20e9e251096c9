"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import math
import time

import numpy as np

from hybridnor import oracle
from hybridnor.charliefit import (CharacteristicDelays, FitConfig, char_fall_plus_inf,
                                  char_fall_zero, char_rise, characteristic_delays, fit)
from hybridnor.cli import main as cli_main
from hybridnor.lintraj import chain, eigenvalues
from hybridnor.misdelay import INF_PROXY, delay_curve, delay_falling, delay_rising
from hybridnor.params import MODES, TABLE_I, StateVector
from hybridnor.simkit import (ChannelModel, DigitalTrace, TraceGenConfig, compare_models,
                              deviation_area, exp_channel_for, inertial_for)

from conftest import random_params, random_schedule, record_criterion

P = TABLE_I
P0 = TABLE_I.with_(delta_min=0.0)
PS = 1e-12


def test_c1_analytic_matches_oracle():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        p = random_params(rng, v_dd=float(rng.uniform(0.5, 1.5)))
        slow = min(abs(lam) for m in MODES for lam in eigenvalues(p, m) if lam != 0.0)
        horizon = 4.0 / slow
        sched = random_schedule(rng, horizon)
        init = StateVector(*rng.uniform(0.0, p.v_dd, 2))
        s = oracle.integrate(p, sched, init, horizon)
        vn, vo = chain(p, init, sched).sample(s.t)
        dev = max(np.abs(vn - s.v_n).max(), np.abs(vo - s.v_o).max()) / p.v_dd
        worst = max(worst, dev)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 60
    record_criterion(1, ok, f"worst sup-norm {worst:.2e}*V_DD over 100 random cases "
                            f"(tol 1e-6), {elapsed:.1f} s")
    assert ok


def test_c2_exact_formulas():
    z = delay_falling(P, 0.0) - P.delta_min
    m = delay_falling(P, -2e-10) - P.delta_min
    err_z = abs(z - char_fall_zero(P))
    err_m = abs(m - math.log(2) * P.c_out * P.r4)
    tot_z, tot_m = z + 18 * PS, m + 18 * PS
    ok = (err_z <= 1e-15 and err_m <= 1e-15
          and abs(tot_z - 28 * PS) <= 1.5 * PS and abs(tot_m - 38 * PS) <= 1.5 * PS)
    record_criterion(2, ok, f"|d(0)-formula| = {err_z:.1e} s, |d(-inf)-ln2 C_O R4| = {err_m:.1e} s; "
                            f"totals {tot_z / PS:.3f} ps / {tot_m / PS:.3f} ps (targets 28/38 +-1.5)")
    assert ok


def test_c3_ratio_law():
    p = P0.with_(r4=P0.r3)
    ratio = delay_falling(p, -INF_PROXY) / delay_falling(p, 0.0)
    rel = abs(ratio - 2.0) / 2.0
    ok = rel <= 1e-12
    record_criterion(3, ok, f"R3 = R4: d(-inf)/d(0) = {ratio:.15f} (rel err {rel:.1e}, tol 1e-12)")
    assert ok


def test_c4_speed_up_shape():
    deltas = np.linspace(-200, 200, 401) * PS
    d = np.array(delay_curve(P, "falling", 0.0, deltas).delays)
    at_min = deltas[int(np.argmin(d))]
    far = np.abs(deltas) >= 150 * PS
    var = max(np.ptp(d[far & (deltas < 0)]), np.ptp(d[far & (deltas > 0)]))
    ok = at_min == 0.0 and var < 0.1 * PS
    record_criterion(4, ok, f"minimum at delta = {at_min / PS:.1f} ps, saturation variation "
                            f"{var / PS:.2e} ps for |delta| >= 150 ps (tol 0.1 ps)")
    assert ok


def test_c5_closed_form_approximations():
    """The tangent-line approximations at their default expansion points, literal constants.

    Disagreement is reported in full; a failure here is a property of the
    reference expressions, not of the exact delays.
    """
    rows = [
        ("fall(+inf)", char_fall_plus_inf(P0), delay_falling(P0, INF_PROXY)),
        ("rise(+inf)", char_rise(P0, INF_PROXY, 0.0), delay_rising(P0, INF_PROXY, 0.0)),
        ("rise(-inf)", char_rise(P0, -INF_PROXY, 0.0), delay_rising(P0, -INF_PROXY, 0.0)),
    ]
    parts = []
    ok = True
    for name, approx, exact in rows:
        err = abs(approx - exact)
        ok &= err <= 1 * PS
        parts.append(f"{name} formula {approx / PS:.2f} ps vs exact {exact / PS:.2f} ps "
                     f"(|err| {err / PS:.2f} ps)")
    record_criterion(5, ok, "; ".join(parts) + "; tol 1 ps")
    assert ok


def test_c6_fit_round_trip_and_infeasibility():
    start = time.perf_counter()
    targets = characteristic_delays(P)
    res = fit(targets, FitConfig(delta_min=P.delta_min))
    worst = max(abs(r) for r in res.residuals.values())
    two = CharacteristicDelays(d_fall_minus_inf=38 * PS, d_fall_zero=28 * PS)
    bad = fit(two, FitConfig(delta_min=0.0))
    flagged = (not bad.feasible) and any("infeasible" in m for m in bad.diagnostics)
    elapsed = time.perf_counter() - start
    ok = worst <= 0.1 * PS and flagged and elapsed < 60
    record_criterion(6, ok, f"round-trip worst residual {worst / PS:.2e} ps (tol 0.1); "
                            f"38/28 ps with delta_min = 0 flagged infeasible: {flagged}; "
                            f"{elapsed:.1f} s")
    assert ok


def test_c7_involution():
    ch = exp_channel_for(P)
    rng = np.random.default_rng(7)
    ts = rng.uniform(ch.domain_down() + 1e-13, 5e-10, 1000)
    err = float(np.max(np.abs(-ch.delay_up(-ch.delay_down(ts)) - ts)))
    ok = err <= 1e-15
    record_criterion(7, ok, f"max |-d_up(-d_down(T)) - T| = {err:.1e} s over 1000 T (tol 1e-15)")
    assert ok


def _grid_trace(rng, n_cells):
    k = int(rng.integers(0, 12))
    cells = np.sort(rng.choice(np.arange(1, n_cells), size=k, replace=False))
    return DigitalTrace(int(rng.integers(0, 2)), cells * PS), cells


def test_c8_metric_properties():
    rng = np.random.default_rng(8)
    n_cells = 400
    horizon = n_cells * PS
    mids = (np.arange(n_cells) + 0.5) * PS
    worst_brute = worst_tri = 0.0
    sym_ok = ident_ok = True
    for _ in range(10_000):
        a, _ = _grid_trace(rng, n_cells)
        b, _ = _grid_trace(rng, n_cells)
        c, _ = _grid_trace(rng, n_cells)
        ab, ba = deviation_area(a, b, horizon), deviation_area(b, a, horizon)
        ac, bc = deviation_area(a, c, horizon), deviation_area(b, c, horizon)
        sym_ok &= ab == ba and ab >= 0
        ident_ok &= deviation_area(a, a, horizon) == 0.0
        worst_tri = max(worst_tri, ac - (ab + bc))
        # transitions sit on cell edges, so cell-midpoint sampling is exact
        brute = float(np.count_nonzero(a.level_at(mids) != b.level_at(mids))) * PS
        worst_brute = max(worst_brute, abs(ab - brute))
    ok = sym_ok and ident_ok and worst_tri <= 1e-14 and worst_brute <= 1e-14
    record_criterion(8, ok, f"10^4 triples: symmetric {sym_ok}, identity {ident_ok}, "
                            f"triangle slack {worst_tri:.1e} s, brute-force gap {worst_brute:.1e} s "
                            f"(tol 1e-14)")
    assert ok


def test_c9_model_ranking():
    start = time.perf_counter()
    channels = [ChannelModel.hybrid(P, name="hybrid"), exp_channel_for(P, 20 * PS),
                inertial_for(P)]
    rep = compare_models(P, channels, TraceGenConfig(mu=100 * PS, sigma=50 * PS, count=500,
                                                     scope="LOCAL", seed=0), repetitions=20)
    m = rep.mean
    elapsed = time.perf_counter() - start
    ok = m["hybrid"] < m["exp_involution"] and m["hybrid"] < m["inertial"] and elapsed < 300
    record_criterion(9, ok, "mean deviation area hybrid {:.3g} ps, exp_involution {:.4g} ps, "
                            "inertial {:.4g} ps over 20 seeds; {:.1f} s".format(
                                m["hybrid"] / PS, m["exp_involution"] / PS,
                                m["inertial"] / PS, elapsed))
    assert ok


def test_c10_cli_determinism(tmp_path):
    runs = [
        ["simulate", "--count", "60", "--seed", "5", "--oracle"],
        ["compare", "--count", "60", "--repetitions", "2", "--seed", "5"],
        ["delay-sweep", "--polarity", "rising", "--vn", "half", "--grid=-1e-10:1e-10:11"],
        ["trajectory", "--schedule", "0:10,2e-11:11", "--oracle"],
        ["characteristic"],
    ]
    mismatched = []
    n_files = 0
    for i, argv in enumerate(runs):
        outs = [tmp_path / f"r{i}_{k}" for k in range(2)]
        for out in outs:
            assert cli_main(argv + ["--out", str(out)]) == 0
        for f in sorted(outs[0].glob("*.csv")):
            n_files += 1
            if f.read_bytes() != (outs[1] / f.name).read_bytes():
                mismatched.append(f"{argv[0]}/{f.name}")
    ok = not mismatched
    record_criterion(10, ok, f"{n_files} CSV outputs from {len(runs)} repeated CLI runs; "
                             f"byte mismatches: {mismatched or 'none'}")
    assert ok
