"""MIS delay curves over the input separation, falling and rising outputs.

The rising curves are produced for internal-node start values GND, V_DD/2
and V_DD.  Also prints the six characteristic delays.
"""

import argparse
from pathlib import Path

import numpy as np

from hybridnor.charliefit import TARGET_NAMES, characteristic_delays
from hybridnor.misdelay import delay_curve
from hybridnor.params import TABLE_I, GateParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--params")
    ap.add_argument("--span", type=float, default=200e-12, help="sweep |delta| up to this")
    ap.add_argument("--points", type=int, default=161)
    ap.add_argument("--out", default="results/delay_curves")
    args = ap.parse_args()
    p = GateParams.load(args.params) if args.params else TABLE_I
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    deltas = np.linspace(-args.span, args.span, args.points)
    deltas[np.argmin(np.abs(deltas))] = 0.0

    fall = delay_curve(p, "falling", 0.0, deltas)
    fall.to_csv(out / "falling.csv")
    d = np.array(fall.delays)
    print(f"falling: min {d.min() * 1e12:.3f} ps at delta = "
          f"{deltas[d.argmin()] * 1e12:.1f} ps, ends {d[0] * 1e12:.3f} / {d[-1] * 1e12:.3f} ps")

    for label, x in (("gnd", 0.0), ("half", p.v_dd / 2), ("vdd", p.v_dd)):
        rise = delay_curve(p, "rising", x, deltas)
        rise.to_csv(out / f"rising_{label}.csv")
        r = np.array(rise.delays)
        print(f"rising V_N(0)={label:<4}: at -span {r[0] * 1e12:.3f} ps, at 0 "
              f"{r[deltas == 0.0][0] * 1e12:.3f} ps, at +span {r[-1] * 1e12:.3f} ps, "
              f"max {r.max() * 1e12:.3f} ps")

    cd = characteristic_delays(p)
    for name in TARGET_NAMES:
        print(f"{name:<18} {getattr(cd, name) * 1e12:8.3f} ps")


if __name__ == "__main__":
    main()
