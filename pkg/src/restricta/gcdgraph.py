"""Small-instance GCD-graph laboratory.

Graphs on integer sets with edges where gcd >= B, exhaustive search for
common divisors of many elements, the primorial instance where no single
divisor covers more than two elements, density-ratio diagnostics, and the
bipartite compression step with its quality measure
delta^10 * |V| * |W| * a*b/gcd(a,b)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, UsageError
from .primes import _simple_sieve, divisors, factorize

GRAPH_CAP = 10**4
MODEL_CAP = 2000
PAIR_BUDGET = 10**7


@dataclass(frozen=True)
class GcdInstance:
    """A set of distinct positive integers with a divisor threshold."""

    S: tuple[int, ...]
    B: int
    eta: float = 1.0

    def __post_init__(self):
        vals = tuple(sorted(set(self.S)))
        if not vals:
            raise UsageError("S must be nonempty")
        if vals[0] < 1:
            raise UsageError("elements must be positive")
        if self.B < 1:
            raise UsageError("need B >= 1")
        if not 0 < self.eta <= 1:
            raise UsageError("need eta in (0, 1]")
        object.__setattr__(self, "S", vals)


@dataclass(frozen=True)
class GcdGraph:
    """Unordered pairs of S with gcd >= B, and the pair density."""

    S: tuple[int, ...]
    B: int
    edges: tuple[tuple[int, int], ...]
    density: float


def build_gcd_graph(S, B: int) -> GcdGraph:
    """All unordered pairs {u, v} of S with gcd(u, v) >= B."""
    vals = sorted(set(int(s) for s in S))
    if len(vals) > GRAPH_CAP:
        raise CapExceeded(f"|S| = {len(vals)} above cap {GRAPH_CAP}")
    arr = np.array(vals, dtype=np.int64)
    edges = []
    for i in range(len(arr) - 1):
        g = np.gcd(arr[i], arr[i + 1 :])
        for j in np.flatnonzero(g >= B):
            edges.append((vals[i], vals[i + 1 + int(j)]))
    npairs = len(vals) * (len(vals) - 1) // 2
    density = len(edges) / npairs if npairs else 0.0
    return GcdGraph(tuple(vals), B, tuple(edges), density)


def model_problem_search(inst: GcdInstance):
    """Exhaustive search over divisors g >= B of elements of S for the one
    dividing the most elements.

    Returns (g, multiplicity) maximising multiplicity (smallest such g on
    ties), or None when no element has a divisor >= B.  Factorizations are
    exact; elements that cannot be certified raise FactorizationTooHard.
    """
    if len(inst.S) > MODEL_CAP:
        raise CapExceeded(f"|S| = {len(inst.S)} above cap {MODEL_CAP}")
    counts: dict[int, int] = {}
    for s in inst.S:
        for d in divisors(s):
            if d >= inst.B:
                counts[d] = counts.get(d, 0) + 1
    if not counts:
        return None
    mult = max(counts.values())
    g = min(d for d, c in counts.items() if c == mult)
    # recount directly; the result must stand on its own
    check = sum(1 for s in inst.S if s % g == 0)
    assert check == mult
    return g, mult


@dataclass(frozen=True)
class ChowReport:
    """The primes-in-(y,2y] instance: pairwise gcds clear the threshold but
    no integer above it divides three elements."""

    y: int
    Q: int
    S: tuple[int, ...]
    B: Fraction
    max_multiplicity: int
    pair_gcd_min: int
    triple_gcd_max: int
    verified: bool

    def to_json(self) -> dict:
        return {
            "y": self.y,
            "Q": str(self.Q),
            "S": [str(s) for s in self.S],
            "B": {"num": str(self.B.numerator), "den": str(self.B.denominator)},
            "maxMultiplicity": self.max_multiplicity,
            "pairGcdMin": self.pair_gcd_min,
            "tripleGcdMax": self.triple_gcd_max,
            "verified": self.verified,
        }


def chow_counterexample(y: int) -> ChowReport:
    """Build Q = prod_{p<=2y} p, S = {Q/p : y < p <= 2y}, B = Q/(4y^2) and
    verify exactly: every pair gcd >= B, every triple gcd < B, so the
    maximal multiplicity of a divisor >= B is exactly 2 (when |S| >= 2)."""
    if y < 4:
        raise UsageError("need y >= 4 (so that p*l*m > 4y^2 for the triple check)")
    ps = _simple_sieve(2 * y).tolist()
    Q = 1
    for p in ps:
        Q *= p
    band = [p for p in ps if y < p <= 2 * y]
    if not band:
        raise UsageError(f"no primes in ({y}, {2 * y}]")
    S = tuple(Q // p for p in band)
    B = Fraction(Q, 4 * y * y)
    pair_min = None
    triple_max = None
    ok = True
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            g = math.gcd(S[i], S[j])
            ok = ok and (g >= B)
            pair_min = g if pair_min is None else min(pair_min, g)
            for k in range(j + 1, len(S)):
                g3 = math.gcd(g, S[k])
                ok = ok and (g3 < B)
                triple_max = g3 if triple_max is None else max(triple_max, g3)
    max_mult = 2 if len(S) >= 2 else 1
    # any g >= B dividing three elements would divide their gcd, which is < B
    return ChowReport(y, Q, S, B, max_mult, pair_min or 0, triple_max or 0, ok)


def green_walker_ratio(R, S, B: int) -> tuple[float, float]:
    """Pair-gcd density delta of R x S and the diagnostic ratio
    |R||S| * B^2 * delta^2.1 / (X*Y) with X = min(R), Y = min(S)."""
    rv = sorted(set(int(x) for x in R))
    sv = sorted(set(int(x) for x in S))
    if not rv or not sv:
        raise UsageError("R and S must be nonempty")
    if len(rv) * len(sv) > PAIR_BUDGET:
        raise CapExceeded("pair count above budget")
    ra = np.array(rv, dtype=np.int64)
    sa = np.array(sv, dtype=np.int64)
    hits = 0
    for x in ra.tolist():
        hits += int(np.count_nonzero(np.gcd(np.int64(x), sa) >= B))
    delta = hits / (len(rv) * len(sv))
    X, Y = rv[0], sv[0]
    ratio = len(rv) * len(sv) * B * B * delta**2.1 / (X * Y)
    return delta, ratio


# ------------------------------------------------- bipartite compression


@dataclass(frozen=True)
class BipartiteGcdGraph:
    """Bipartite gcd graph with accumulated divisors a | v, b | w tracked
    as prime-exponent maps so divisibility stays verifiable exactly."""

    V: tuple[int, ...]
    W: tuple[int, ...]
    B: int
    edges: tuple[tuple[int, int], ...]  # index pairs into V x W
    a: int = 1
    b: int = 1
    a_exp: tuple[tuple[int, int], ...] = field(default=())
    b_exp: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        for v in self.V:
            if v % self.a:
                raise UsageError(f"a = {self.a} does not divide {v}")
        for w in self.W:
            if w % self.b:
                raise UsageError(f"b = {self.b} does not divide {w}")

    @property
    def density(self) -> float:
        n = len(self.V) * len(self.W)
        return len(self.edges) / n if n else 0.0

    @property
    def quality(self) -> float:
        """delta^10 * |V| * |W| * a*b/gcd(a,b)^2."""
        if not self.V or not self.W:
            return 0.0
        g = math.gcd(self.a, self.b)
        return self.density**10 * len(self.V) * len(self.W) * float(
            Fraction(self.a * self.b, g * g)
        )


def bipartite_from_set(S, B: int) -> BipartiteGcdGraph:
    """Two copies of S with edges where gcd >= B (the compression start)."""
    vals = tuple(sorted(set(int(s) for s in S)))
    if len(vals) ** 2 > PAIR_BUDGET:
        raise CapExceeded("pair count above budget")
    edges = []
    for i, v in enumerate(vals):
        for j, w in enumerate(vals):
            if math.gcd(v, w) >= B:
                edges.append((i, j))
    return BipartiteGcdGraph(vals, vals, B, tuple(edges))


@dataclass(frozen=True)
class CompressionCandidate:
    keep_v: bool  # True: restrict to p | v; False: restrict to p does not divide v
    keep_w: bool
    graph: BipartiteGcdGraph
    measure: float
    empty: bool


def _with_prime(exp: tuple, value: int, p: int) -> tuple[tuple, int]:
    """Multiply the tracked divisor by p unless p is already present."""
    d = dict(exp)
    if p in d:
        return exp, value
    d[p] = 1
    return tuple(sorted(d.items())), value * p


def compression_step(g: BipartiteGcdGraph, p: int) -> list[CompressionCandidate]:
    """The four restrictions (p | v or not) x (p | w or not).

    Imposing divisibility multiplies the tracked divisor by p (once); the
    four candidate vertex sets tile V x W, so the candidate edge sets
    partition the original edges.
    """
    if p < 2 or not factorize(p) == {p: 1}:
        raise UsageError(f"{p} is not prime")
    out = []
    for keep_v in (True, False):
        vs = tuple(i for i, v in enumerate(g.V) if (v % p == 0) == keep_v)
        for keep_w in (True, False):
            ws = tuple(j for j, w in enumerate(g.W) if (w % p == 0) == keep_w)
            vset = tuple(g.V[i] for i in vs)
            wset = tuple(g.W[j] for j in ws)
            vmap = {i: n for n, i in enumerate(vs)}
            wmap = {j: n for n, j in enumerate(ws)}
            edges = tuple(
                (vmap[i], wmap[j]) for i, j in g.edges if i in vmap and j in wmap
            )
            a_exp, a = (g.a_exp, g.a)
            b_exp, b = (g.b_exp, g.b)
            if keep_v:
                a_exp, a = _with_prime(g.a_exp, g.a, p)
            if keep_w:
                b_exp, b = _with_prime(g.b_exp, g.b, p)
            sub = BipartiteGcdGraph(vset, wset, g.B, edges, a, b, a_exp, b_exp)
            empty = not vset or not wset
            out.append(
                CompressionCandidate(keep_v, keep_w, sub, sub.quality, empty)
            )
    return out


def compress_greedy(S, B: int, max_nonimproving: int | None = None) -> BipartiteGcdGraph:
    """Heuristic driver: repeatedly apply the compression step with the
    prime and restriction of highest quality measure.

    The stopping rule (a budget of non-improving steps, default
    10*log|S|) is a demonstration choice, not a tuned strategy.
    """
    g = bipartite_from_set(S, B)
    if max_nonimproving is None:
        max_nonimproving = max(1, int(10 * math.log(max(2, len(g.V)))))
    used: set[int] = set()
    budget = max_nonimproving
    while budget > 0:
        primes: set[int] = set()
        for v in g.V + g.W:
            primes.update(factorize(v))
        primes -= used
        if not primes:
            break
        best = None
        best_p = None
        for p in sorted(primes):
            for cand in compression_step(g, p):
                if cand.empty:
                    continue
                if best is None or cand.measure > best.measure:
                    best, best_p = cand, p
        if best is None:
            break
        used.add(best_p)
        if best.measure <= g.quality:
            budget -= 1
        g = best.graph
    return g


def empty_candidates(cands: list[CompressionCandidate]) -> int:
    return sum(1 for c in cands if c.empty)
