#!/usr/bin/env python3
"""Tabulate Markov-matrix eigenvalue certificates for one-missing-digit
systems: the certified bound per missing digit and block length, against
the q^(1/5) certification threshold.

Example:
    python scripts/markov_certificates.py --q 10 --ell-max 3
    python scripts/markov_certificates.py --q 10 --ell 4 --sigma 1.5260
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from restricta import markov
from restricta.digit_systems import DigitSystem


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=10)
    ap.add_argument("--ell-max", type=int, default=3, dest="ell_max")
    ap.add_argument("--ell", type=int, help="single block length instead of a sweep")
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=markov.DEFAULT_GRID)
    args = ap.parse_args()

    q = args.q
    ells = [args.ell] if args.ell else list(range(1, args.ell_max + 1))
    thr = q**0.2
    print(f"q = {q}, sigma = {args.sigma}, certification threshold q^(1/5) = {thr:.6f}")
    header = "b " + " ".join(f"{'ell=' + str(e):>14s}" for e in ells)
    print(header)
    for b in range(q):
        sys_ = DigitSystem.excluding(q, {b})
        cells = []
        for e in ells:
            bound = markov.row_sum_bound(markov.build_matrix(sys_, e, args.sigma, args.grid))
            flag = "*" if bound < thr else " "
            cells.append(f"{bound:>13.7f}{flag}")
        print(f"{b} " + " ".join(cells))
    print("(* = certified below q^(1/5))")


if __name__ == "__main__":
    main()
