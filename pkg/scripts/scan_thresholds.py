#!/usr/bin/env python3
"""Scan the certified bound sums across a base window and report where each
first clears its threshold.

Examples:
    python scripts/scan_thresholds.py --kind sin-sum --lo 133000 --hi 133400
    python scripts/scan_thresholds.py --kind pairwise --lo 18500 --hi 18700 --csv out.csv
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from restricta import fourier


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", choices=("sin-sum", "pairwise"), default="sin-sum")
    ap.add_argument("--lo", type=int, default=133000)
    ap.add_argument("--hi", type=int, default=133400)
    ap.add_argument("--csv", help="also write q,value,threshold,passes rows here")
    args = ap.parse_args()

    out = open(args.csv, "w") if args.csv else None
    if out:
        out.write("q,value,threshold,passes\n")
    first = None
    for q, rep in fourier.scan_bound(args.kind, args.lo, args.hi):
        if out:
            out.write(f"{q},{rep.value!r},{rep.threshold!r},{str(rep.passes).lower()}\n")
        if rep.passes and first is None:
            first = q
    if out:
        out.close()
    if first is None:
        print(f"{args.kind}: no q in [{args.lo}, {args.hi}] passes its threshold")
    else:
        rep = dict(fourier.scan_bound(args.kind, first, first))[first]
        print(
            f"{args.kind}: first passing q = {first} "
            f"(value {rep.value:.6g} < threshold {rep.threshold:.6g})"
        )


if __name__ == "__main__":
    main()
