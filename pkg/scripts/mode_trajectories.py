"""V_N and V_O over time in each of the four modes, analytic and RK4.

Every mode starts from (V_DD, V_DD) except 00, which starts from ground, and
11, whose internal node starts at V_DD/2.  Writes one CSV per mode.
"""

import argparse
from pathlib import Path

import numpy as np

from hybridnor import oracle
from hybridnor.lintraj import chain
from hybridnor.params import MODES, TABLE_I, GateParams, StateVector


def initial_state(p: GateParams, mode) -> StateVector:
    if str(mode) == "00":
        return StateVector(0.0, 0.0)
    if str(mode) == "11":
        return StateVector(p.v_dd / 2, p.v_dd)
    return StateVector(p.v_dd, p.v_dd)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--params", help="GateParams JSON (default: built-in set)")
    ap.add_argument("--horizon", type=float, default=1e-10)
    ap.add_argument("--samples", type=int, default=401)
    ap.add_argument("--out", default="results/trajectories")
    args = ap.parse_args()
    p = GateParams.load(args.params) if args.params else TABLE_I
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ts = np.linspace(0.0, args.horizon, args.samples)
    for mode in MODES:
        init = initial_state(p, mode)
        sched = [(0.0, mode)]
        traj = chain(p, init, sched)
        v_n, v_o = traj.sample(ts)
        s = oracle.integrate(p, sched, init, args.horizon)
        ex_n, ex_o = traj.sample(s.t)
        dev = max(np.abs(ex_n - s.v_n).max(), np.abs(ex_o - s.v_o).max())
        np.savetxt(out / f"mode_{mode}.csv", np.column_stack([ts, v_n, v_o]), delimiter=",",
                   header="t,v_n,v_o", comments="", fmt="%.17g")
        t_half = traj.crossings(p.v_th, args.horizon)
        first = f"{t_half[0][0] * 1e12:8.3f} ps" if t_half else "    none"
        print(f"mode {mode}: init {tuple(round(x, 3) for x in init)}  v_th crossing {first}  "
              f"max |analytic - RK4| = {dev:.2e} V")


if __name__ == "__main__":
    main()
