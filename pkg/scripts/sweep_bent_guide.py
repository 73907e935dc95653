#!/usr/bin/env python3
"""Sweep the bent-guide half-angle and write the certification table as CSV.

The table localizes the smallest angle at which the analytic chain bound
certifies the single bound state with no threshold resonance.
"""

import argparse
import sys

import numpy as np

from starspec import certify
from starspec.cli import _sweep_csv


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", type=float, default=0.35)
    ap.add_argument("--stop", type=float, default=1.57)
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--anchor", type=float, default=1.0,
                    help="angle used for the one-off existence verification")
    ap.add_argument("-o", "--output", default="bent_guide_sweep.csv")
    args = ap.parse_args()

    alphas = np.arange(args.start, args.stop + 1e-12, args.step)
    rows = certify.sweep_broken(alphas, existence_anchor=args.anchor)
    with open(args.output, "w") as f:
        f.write(_sweep_csv(rows))
    first = certify.first_certified(rows)
    print(f"wrote {len(rows)} rows to {args.output}")
    print(f"first certified angle: {first}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
