#!/usr/bin/env python3
"""Per-class circle-dissection masses for a digit system across digit
counts: how much of (1/N) sum |S_P||S_A| sits on each arc class.

Example:
    python scripts/arc_masses.py --sys q=10,exclude=7 --ks 4 5 --A 1.5
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from restricta import arcs, primes
from restricta.digit_systems import DigitSystem


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sys", default="q=10,exclude=7")
    ap.add_argument("--ks", type=int, nargs="+", default=[4, 5])
    ap.add_argument("--A", type=float, default=1.5)
    args = ap.parse_args()

    sys_ = DigitSystem.parse(args.sys)
    table = primes.sieve_primes(sys_.q ** max(args.ks))
    print("k,class,count,mass,mass_per_member")
    for k in args.ks:
        breakdown = arcs.arc_mass_breakdown(sys_, k, table, args.A)
        size = sys_.size**k
        for name in (arcs.PRIMARY_MAJOR, arcs.SMOOTH_MAJOR, arcs.NONSMOOTH_MAJOR, arcs.MINOR):
            mass = breakdown["mass"][name]
            print(f"{k},{name},{breakdown['count'][name]},{mass!r},{mass / size!r}")


if __name__ == "__main__":
    main()
