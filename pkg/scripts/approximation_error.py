"""Error of the closed-form characteristic-delay approximations.

Evaluates the three approximations with the literal constants and expansion
points, then with constants matched to V_DD while moving the expansion point
toward the true crossing.
"""

import argparse

import numpy as np

from hybridnor.charliefit import ApproxConstants, char_fall_plus_inf, char_rise
from hybridnor.misdelay import INF_PROXY, delay_falling, delay_rising
from hybridnor.params import TABLE_I, GateParams

PS = 1e-12


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--params")
    args = ap.parse_args()
    p = (GateParams.load(args.params) if args.params else TABLE_I).with_(delta_min=0.0)
    cases = {
        "fall(+inf)": (lambda c, w: char_fall_plus_inf(p, c, w), delay_falling(p, INF_PROXY), 0.0),
        "rise(+inf)": (lambda c, w: char_rise(p, INF_PROXY, 0.0, c, w),
                       delay_rising(p, INF_PROXY, 0.0), INF_PROXY),
        "rise(-inf)": (lambda c, w: char_rise(p, -INF_PROXY, 0.0, c, w),
                       delay_rising(p, -INF_PROXY, 0.0), INF_PROXY),
    }
    literal = ApproxConstants()
    matched = ApproxConstants(half=p.v_dd / 2, quarter=p.v_dd / 4)
    print(f"{'case':<12}{'exact':>10}{'literal':>12}{'error':>10}")
    for name, (f, exact, _) in cases.items():
        approx = f(literal, None)
        print(f"{name:<12}{exact / PS:>10.3f}{approx / PS:>12.3f}{(approx - exact) / PS:>10.3f}  ps")
    print("\nconstants matched to V_DD, expansion point t_w = start + f * exact delay")
    print(f"{'case':<12}" + "".join(f"{'f=' + str(x):>12}" for x in (0.25, 0.5, 0.75, 0.9, 1.0)))
    for name, (f, exact, start) in cases.items():
        errs = [f(matched, start + frac * exact) - exact for frac in (0.25, 0.5, 0.75, 0.9, 1.0)]
        print(f"{name:<12}" + "".join(f"{e / PS:>12.4g}" for e in np.array(errs)) + "  ps")


if __name__ == "__main__":
    main()
