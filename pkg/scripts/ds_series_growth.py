#!/usr/bin/env python3
"""Growth table for the primorial counterexample series: the base series
sum 1/(l log l) against the spread series carrying the Mertens factor
prod_{p<l}(1 + 1/p), over increasing prime caps.

Example:
    python scripts/ds_series_growth.py --caps 100 1000 10000 100000
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from restricta import dioph


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--caps", type=int, nargs="+", default=[100, 1000, 10**4, 10**5])
    args = ap.parse_args()

    print(f"{'cap':>8s} {'base':>10s} {'spread':>10s} {'ratio':>8s}")
    for cap in args.caps:
        rep = dioph.ds_counterexample(cap)
        ratio = rep.spread_series / rep.base_series
        print(f"{cap:>8d} {rep.base_series:>10.5f} {rep.spread_series:>10.5f} {ratio:>8.4f}")
    print("base converges (prime number theorem); spread grows like sum 1/l.")


if __name__ == "__main__":
    main()
