"""Parameter fitting: round trip from the built-in set, and the 38/28 ps falling pair.

The pair is fitted with no pure delay (unreachable: the ratio law pins
d(-inf)/d(0) to (R3+R4)/R3), with an 18 ps pure delay, and with the pure delay
left free.
"""

import argparse

from hybridnor.charliefit import CharacteristicDelays, FitConfig, characteristic_delays, fit
from hybridnor.params import TABLE_I

PS = 1e-12


def report(label, res):
    worst = max(abs(r) for r in res.residuals.values())
    p = res.params
    print(f"{label}: feasible={res.feasible} worst residual {worst / PS:.3g} ps, "
          f"(R3+R4)/R3 = {(p.r3 + p.r4) / p.r3:.3f}, delta_min = {p.delta_min / PS:.2f} ps, "
          f"{res.n_evals} evaluations")
    for msg in res.diagnostics:
        print(f"    {msg}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.parse_args()
    report("round trip", fit(characteristic_delays(TABLE_I), FitConfig(delta_min=TABLE_I.delta_min)))
    pair = CharacteristicDelays(d_fall_minus_inf=38 * PS, d_fall_zero=28 * PS)
    report("38/28 ps, delta_min = 0", fit(pair, FitConfig(delta_min=0.0)))
    report("38/28 ps, delta_min = 18 ps", fit(pair, FitConfig(delta_min=18 * PS)))
    report("38/28 ps, delta_min free", fit(pair, FitConfig(delta_min=None)))


if __name__ == "__main__":
    main()
