#!/usr/bin/env python3
"""Completeness probe fan across every built-in chart family.

Shoots a seeded sphere of directions out to a fixed horizon on a reference
chart from each family, tallies the outcomes, and contrasts the two
exponential-profile presets whose Ricci monitor behaves asymmetrically:
one direction of travel piles up curvature, the reverse stays tame.
"""

import argparse
import json
import sys

from curvops.catalog import (
    DunnSpec,
    FiedlerSpec,
    LorentzMFSpec,
    MBetaSpec,
    Warped3DSpec,
)
from curvops.geodesics import IntegrationOptions, completeness_probe

PROBES = (
    ("warped3d", Warped3DSpec(alpha="0.1*(x1*x1 + x2*x2)"), (0.0, 0.0, 1.0)),
    ("mbeta", MBetaSpec(beta=1.0), (0.0, 0.0, 2.0, 2.0)),
    ("dunn", DunnSpec(p=2, psi=(("x2*x2", "0"), ("0", "0"))), (0.0, 0.0, 0.0, 0.0)),
    (
        "fiedler",
        FiedlerSpec(nu=2, xi=((1.0, 0.0), (0.0, 1.0)), f="u1*u1 + u2*u2"),
        (0.0, 0.0, 0.0, 0.0),
    ),
    ("lorentz_mf s_plus", LorentzMFSpec.from_preset("s_plus"), (0.0, 0.0, 0.0)),
    ("lorentz_mf n1m", LorentzMFSpec.from_preset("n1m"), (0.0, 0.0, 0.0)),
    ("lorentz_mf n1p", LorentzMFSpec.from_preset("n1p"), (0.0, 0.0, 0.0)),
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--horizon", type=float, default=20.0)
    parser.add_argument("--directions", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--speed", type=float, default=0.5)
    parser.add_argument("--output", default="completeness_report.json")
    args = parser.parse_args(argv)

    # Ricci monitor for the exponential-profile pair, plain run elsewhere
    ricci = IntegrationOptions(monitor="ricci_vv", blowup_threshold=1e6)
    runs = []
    for label, spec, point in PROBES:
        options = ricci if label.endswith(("n1m", "n1p")) else None
        report = completeness_probe(
            spec.build(),
            point,
            horizon=args.horizon,
            num_directions=args.directions,
            seed=args.seed,
            speed=args.speed,
            options=options,
        )
        counts = report.counts
        tally = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
        flag = "complete-at-horizon" if report.all_reached else "events"
        print(f"{label:18s} {flag:20s} {tally}")
        runs.append({"label": label, "report": report.to_json()})

    with open(args.output, "w", encoding="utf-8") as handle:
        json.dump({"horizon": args.horizon, "runs": runs}, handle, indent=2)
        handle.write("\n")
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
