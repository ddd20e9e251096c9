"""Deviation-area comparison of delay channels against the RK4-integrated gate.

Runs each trace configuration (mu/sigma, LOCAL or GLOBAL) for a number of
seeds and writes one report CSV per configuration.
"""

import argparse
from pathlib import Path

from hybridnor.params import TABLE_I, GateParams
from hybridnor.simkit import ChannelModel, TraceGenConfig, compare_models, exp_channel_for, inertial_for

PS = 1e-12
CONFIGS = [(100 * PS, 50 * PS, "LOCAL"), (100 * PS, 50 * PS, "GLOBAL"),
           (200 * PS, 100 * PS, "LOCAL"), (200 * PS, 100 * PS, "GLOBAL")]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--params")
    ap.add_argument("--repetitions", type=int, default=20)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/comparison")
    args = ap.parse_args()
    p = GateParams.load(args.params) if args.params else TABLE_I
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    channels = [ChannelModel.hybrid(p, name="hybrid"),
                ChannelModel.hybrid(p.with_(delta_min=0.0), name="hybrid_no_dmin"),
                exp_channel_for(p, 20 * PS), inertial_for(p)]
    for mu, sigma, scope in CONFIGS:
        cfg = TraceGenConfig(mu=mu, sigma=sigma, count=args.count, scope=scope, seed=args.seed)
        rep = compare_models(p, channels, cfg, repetitions=args.repetitions)
        tag = f"{mu / PS:g}_{sigma / PS:g}_{scope}"
        rep.to_csv(out / f"report_{tag}.csv")
        print(f"\n== mu={mu / PS:g} ps sigma={sigma / PS:g} ps {scope} ==")
        print(rep.table())


if __name__ == "__main__":
    main()
