"""Command-line front door: subcommand routing, canonical JSON/CSV output,
and a run manifest on stderr for reproducibility.

Output on stdout is byte-identical for identical argv and version: JSON is
key-sorted with shortest-roundtrip float formatting, exact rationals are
emitted as {"num": "...", "den": "..."} strings, and long scans stream CSV
rows as they are produced.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .digit_systems import DigitSystem, census
from .errors import RestrictaError, UsageError
from . import arcs as _arcs
from . import dioph as _dioph
from . import fourier as _fourier
from . import gcdgraph as _gcd
from . import markov as _markov
from . import primes as _primes


def canonical(obj):
    """Convert to plain JSON-serialisable values: Fractions to num/den
    strings, numpy scalars to Python, complex to re/im, dataclasses via
    their to_json when available."""
    if isinstance(obj, Fraction):
        return {"num": str(obj.numerator), "den": str(obj.denominator)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [canonical(v) for v in obj]
    if hasattr(obj, "to_json"):
        return canonical(obj.to_json())
    if dataclasses.is_dataclass(obj):
        return canonical(dataclasses.asdict(obj))
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj)!r}")


def _dump_json(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, separators=(",", ":"))


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ------------------------------------------------------------- handlers


def _cmd_primes(args):
    table = _primes.sieve_primes(args.limit)
    out = {"N": args.limit, "pi": table.pi(args.limit)}
    if args.ap:
        q, a = (int(x) for x in args.ap.split(","))
        out["ap"] = {"q": q, "a": a, "count": _primes.count_primes_ap(table, args.limit, q, a)}
    if args.exp_sum is not None:
        out["value"] = _primes.prime_exp_sum(table, args.limit, args.exp_sum)
    return out


def _cmd_census(args):
    sys_ = DigitSystem.parse(args.sys)
    rep = census(sys_, args.x)
    return {"sys": sys_.to_json(), **rep.to_json()}


def _cmd_fourier(args):
    if args.scan:
        lo, hi = (int(x) for x in args.scan.split(".."))
        if args.check not in ("sin-sum", "pairwise"):
            raise UsageError("--scan supports sin-sum and pairwise")

        def rows():
            for q, rep in _fourier.scan_bound(args.check, lo, hi):
                yield (q, rep.value, rep.threshold, rep.passes)

        return ("csv", ("q", "value", "threshold", "passes"), rows())
    if args.check in ("sin-sum", "refined", "pairwise"):
        if args.q is None:
            raise UsageError(f"--check {args.check} needs --q")
        if args.check == "sin-sum":
            rep = _fourier.sin_bound_sum(args.q)
        elif args.check == "refined":
            rep = _fourier.refined_digit_sum(args.q, grid=args.grid or 512)
        else:
            rep = _fourier.pairwise_bound_sum(args.q)
    elif args.check == "margin":
        if not args.sys:
            raise UsageError("--check margin needs --sys")
        rep = _fourier.generalized_margin(DigitSystem.parse(args.sys), grid=args.grid or 256)
    else:
        raise UsageError(f"unknown check {args.check!r}")
    out = rep.to_json()
    if args.q is not None:
        out["q"] = args.q
    return out


def _cmd_certify(args):
    sys_ = DigitSystem.parse(args.sys)
    cert = _markov.certify_base(sys_, args.ell_max, sigma=args.sigma, grid=args.grid or _markov.DEFAULT_GRID)
    return {"q": sys_.q, **cert.to_json()}


def _cmd_arcs(args):
    sys_ = DigitSystem.parse(args.sys)
    table = _primes.sieve_primes(sys_.q**args.k)
    if args.full_scan:
        breakdown = _arcs.arc_mass_breakdown(sys_, args.k, table, args.A)

        def rows():
            for name in (_arcs.PRIMARY_MAJOR, _arcs.SMOOTH_MAJOR, _arcs.NONSMOOTH_MAJOR, _arcs.MINOR):
                yield (name, breakdown["count"][name], breakdown["mass"][name])

        return ("csv", ("class", "count", "mass"), rows())
    rep = _arcs.main_term_assembly(sys_, args.k, table)
    return {"sys": sys_.to_json(), "k": args.k, **rep.to_json()}


def _cmd_dioph(args):
    psi = _dioph.PsiFunction.parse(args.psi)
    cmd = args.cmd
    if cmd == "series":
        kh, ds = _dioph.series_partial(psi, args.Q)
        return {"Q": args.Q, "khinchinSum": kh, "dsSum": ds}
    if cmd == "measure":
        if args.R is not None:
            m = _dioph.truncated_limsup_measure(psi, args.Q, args.R, reduced=not args.unreduced)
            return {"Q": args.Q, "R": args.R, "measure": m}
        ev = _dioph.event_union(args.q, psi, reduced=not args.unreduced)
        return {"q": args.q, "measure": ev.measure, "intervals": len(ev)}
    if cmd == "pairs":
        exact, pv = _dioph.pair_overlap(args.q, args.r, psi)
        return {"q": args.q, "r": args.r, "exact": exact, "pvBound": pv}
    if cmd == "select-r":
        return {"Q": args.Q, "R": _dioph.select_R(psi, args.Q, cap=args.cap)}
    if cmd == "counterexample":
        return _dioph.ds_counterexample(args.ell_max).to_json()
    if cmd == "hausdorff":
        expo = _dioph.hausdorff_exponent_for(psi)
        return {
            "exponent": expo,
            "slopeBelow": _dioph.hausdorff_slope(psi.a, expo - 0.05),
            "slopeAbove": _dioph.hausdorff_slope(psi.a, expo + 0.05),
        }
    raise UsageError(f"unknown dioph cmd {cmd!r}")


def _read_set(path: str) -> list[int]:
    with open(path) as fh:
        return [int(line) for line in fh.read().split() if line.strip()]


def _cmd_gcdgraph(args):
    cmd = args.cmd
    if cmd == "chow":
        if args.y is None:
            raise UsageError("chow needs --y")
        return _gcd.chow_counterexample(args.y).to_json()
    if not args.set:
        raise UsageError(f"{cmd} needs --set")
    S = _read_set(args.set)
    if cmd == "build":
        g = _gcd.build_gcd_graph(S, args.B)
        return {
            "B": args.B,
            "edges": [[str(u), str(v)] for u, v in g.edges],
            "density": g.density,
        }
    if cmd == "model":
        res = _gcd.model_problem_search(_gcd.GcdInstance(tuple(S), args.B))
        if res is None:
            return {"B": args.B, "found": False}
        g, mult = res
        return {"B": args.B, "found": True, "g": str(g), "multiplicity": mult}
    if cmd == "green-walker":
        S2 = _read_set(args.set2) if args.set2 else S
        delta, ratio = _gcd.green_walker_ratio(S, S2, args.B)
        return {"B": args.B, "delta": delta, "ratio": ratio}
    if cmd == "compress":
        g = _gcd.compress_greedy(S, args.B)
        return {
            "B": args.B,
            "V": [str(v) for v in g.V],
            "W": [str(w) for w in g.W],
            "a": str(g.a),
            "b": str(g.b),
            "quality": g.quality,
        }
    raise UsageError(f"unknown gcdgraph cmd {cmd!r}")


# --------------------------------------------------------------- plumbing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="restricta",
        description="Digit-restricted prime counting, circle-method arcs, "
        "Markov eigenvalue certificates, and exact Diophantine measures.",
    )
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=1, help="accepted for interface "
                   "compatibility; execution is deterministic regardless")
    p.add_argument("--seedless", action="store_true", default=True,
                   help="forbid nondeterminism (the default and only mode)")
    sub = p.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("primes", help="sieve, count, and evaluate S_P")
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--ap", help="q,a: count primes = a (mod q)")
    sp.add_argument("--exp-sum", type=float, dest="exp_sum")
    sp.set_defaults(func=_cmd_primes)

    sp = sub.add_parser("census", help="count a digit-restricted set and its primes")
    sp.add_argument("--sys", required=True)
    sp.add_argument("--x", type=int, required=True)
    sp.set_defaults(func=_cmd_census)

    sp = sub.add_parser("fourier", help="certified bound sums for window sums")
    sp.add_argument("--check", choices=("sin-sum", "refined", "pairwise", "margin"))
    sp.add_argument("--q", type=int)
    sp.add_argument("--sys")
    sp.add_argument("--grid", type=int)
    sp.add_argument("--scan", help="qmin..qmax, stream CSV rows")
    sp.set_defaults(func=_cmd_fourier)

    sp = sub.add_parser("certify", help="Markov eigenvalue certificates")
    sp.add_argument("--sys", required=True)
    sp.add_argument("--ell-max", type=int, required=True, dest="ell_max")
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--grid", type=int)
    sp.set_defaults(func=_cmd_certify)

    sp = sub.add_parser("arcs", help="circle dissection and main-term assembly")
    sp.add_argument("--sys", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--full-scan", action="store_true", dest="full_scan")
    sp.add_argument("--A", type=float, default=_arcs.DEFAULT_A)
    sp.set_defaults(func=_cmd_arcs)

    sp = sub.add_parser("dioph", help="metric approximation experiments")
    sp.add_argument("--psi", required=True, help="family[:params] or file.csv")
    sp.add_argument("--cmd", required=True,
                    choices=("series", "measure", "pairs", "select-r", "counterexample", "hausdorff"))
    sp.add_argument("--Q", type=int, default=1)
    sp.add_argument("--R", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--r", type=int)
    sp.add_argument("--cap", type=int, default=10**6)
    sp.add_argument("--ell-max", type=int, default=10**5, dest="ell_max")
    sp.add_argument("--unreduced", action="store_true")
    sp.set_defaults(func=_cmd_dioph)

    sp = sub.add_parser("gcdgraph", help="GCD-graph laboratory")
    sp.add_argument("--cmd", required=True,
                    choices=("build", "model", "chow", "green-walker", "compress"))
    sp.add_argument("--set", help="newline-delimited integers")
    sp.add_argument("--set2", help="second set for green-walker")
    sp.add_argument("--B", type=int, default=1)
    sp.add_argument("--y", type=int)
    sp.set_defaults(func=_cmd_gcdgraph)
    return p


def _emit(result, fmt: str, out) -> str:
    """Write the result; return the sha256 digest of the emitted bytes."""
    digest = hashlib.sha256()

    def write(text: str):
        digest.update(text.encode())
        out.write(text)

    if isinstance(result, tuple) and result and result[0] == "csv":
        _, header, rows = result
        write(",".join(header) + "\n")
        for row in rows:
            write(",".join(_csv_cell(c) for c in row) + "\n")
            out.flush()
    elif fmt == "csv" and isinstance(result, dict):
        items = sorted(canonical(result).items())
        write(",".join(k for k, _ in items) + "\n")
        write(",".join(_csv_cell(v) if not isinstance(v, (dict, list)) else json.dumps(v, sort_keys=True) for _, v in items) + "\n")
    else:
        write(_dump_json(result) + "\n")
    return digest.hexdigest()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    start = time.time()
    status = 0
    try:
        result = args.func(args)
    except RestrictaError as exc:
        result = {"error": exc.kind, "message": str(exc)}
        status = 2 if isinstance(exc, UsageError) else 1
    try:
        digest = _emit(result, args.format, sys.stdout)
    except RestrictaError as exc:  # streamed computations may fail mid-scan
        sys.stdout.write("\n")
        result = {"error": exc.kind, "message": str(exc)}
        digest = _emit(result, "json", sys.stdout)
        status = 1
    manifest = {
        "subcommand": args.subcommand,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "version": __version__,
        "wallTimeSec": round(time.time() - start, 6),
        "threads": args.threads,
        "outputSha256": digest,
    }
    sys.stderr.write(json.dumps(manifest, sort_keys=True) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
