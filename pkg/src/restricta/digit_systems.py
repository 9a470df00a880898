"""Digit-restricted integer sets: membership, exact counting, prime census.

A digit system is a base q >= 2 with an allowed digit set D.  The set A
collects every n >= 0 whose standard base-q expansion uses only digits
from D (the expansion of 0 is empty, so 0 is a member iff 0 is allowed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapExceeded, UsageError

ENUM_CAP = 10**8


@dataclass(frozen=True)
class DigitSystem:
    """Base q and allowed digit set, with derived density quantities."""

    q: int
    digits: tuple[int, ...]
    _mask: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self):
        if self.q < 2:
            raise UsageError(f"base must be >= 2, got {self.q}")
        ds = tuple(sorted(set(self.digits)))
        if not ds:
            raise UsageError("digit set must be nonempty")
        if ds[0] < 0 or ds[-1] >= self.q:
            raise UsageError(f"digits must lie in [0, {self.q})")
        object.__setattr__(self, "digits", ds)
        mask = 0
        for d in ds:
            mask |= 1 << d
        object.__setattr__(self, "_mask", mask)

    @classmethod
    def of(cls, q: int, digits) -> "DigitSystem":
        return cls(q, tuple(digits))

    @classmethod
    def excluding(cls, q: int, removed) -> "DigitSystem":
        rem = set(removed)
        return cls(q, tuple(d for d in range(q) if d not in rem))

    @classmethod
    def parse(cls, text: str) -> "DigitSystem":
        """Parse the CLI form "q=10,D=0-6.8-9" or "q=10,exclude=7".

        Digit ranges are dot-separated, each "a-b" inclusive or a single
        digit.
        """
        q = None
        dspec = None
        mode = None
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise UsageError(f"bad digit-system component {part!r}")
            key, val = part.split("=", 1)
            key = key.strip().lower()
            if key == "q":
                q = int(val)
            elif key in ("d", "exclude"):
                dspec, mode = val, key
            else:
                raise UsageError(f"unknown digit-system key {key!r}")
        if q is None or dspec is None:
            raise UsageError(f"digit-system spec needs q= and D=/exclude=: {text!r}")
        chosen = set()
        for rng in dspec.split("."):
            rng = rng.strip()
            if "-" in rng:
                lo, hi = rng.split("-", 1)
                chosen.update(range(int(lo), int(hi) + 1))
            else:
                chosen.add(int(rng))
        if mode == "exclude":
            return cls.excluding(q, chosen)
        return cls.of(q, chosen)

    def spec_string(self) -> str:
        return f"q={self.q},D=" + ".".join(str(d) for d in self.digits)

    @property
    def coprime_digits(self) -> tuple[int, ...]:
        """D_q: the allowed digits coprime to the base."""
        return tuple(d for d in self.digits if math.gcd(d, self.q) == 1)

    @property
    def alpha(self) -> float:
        """Density exponent: |A(x)| grows like x^alpha."""
        return math.log(len(self.digits)) / math.log(self.q)

    @property
    def delta(self) -> float:
        """Defined by |D| = q^(1-2*delta)."""
        return 0.5 * (1.0 - self.alpha)

    @property
    def size(self) -> int:
        return len(self.digits)

    def is_full(self) -> bool:
        return len(self.digits) == self.q

    def missing(self) -> tuple[int, ...]:
        """Digits of [0,q) not in D."""
        return tuple(d for d in range(self.q) if not (self._mask >> d) & 1)

    def contains(self, n: int) -> bool:
        """Digit predicate on the standard base-q expansion of n >= 0."""
        if n < 0:
            return False
        if n == 0:
            return bool(self._mask & 1)
        q, mask = self.q, self._mask
        while n:
            if not (mask >> (n % q)) & 1:
                return False
            n //= q
        return True

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "D": list(self.digits),
            "Dq": list(self.coprime_digits),
            "alpha": self.alpha,
        }


def count_restricted(sys: DigitSystem, x: int) -> int:
    """#{n : 0 <= n <= x, every base-q digit of n lies in D}.

    Standard digit DP over the expansion of x: "free" positions contribute
    |D| choices each, the tight prefix walks digits of x from the top.
    """
    if x < 0:
        raise UsageError("x must be nonnegative")
    xd = []
    t = x
    while t:
        xd.append(t % sys.q)
        t //= sys.q
    xd.reverse()  # most significant first; empty for x = 0
    nd = len(sys.digits)
    lead = [d for d in sys.digits if d > 0]
    count = 1 if x >= 1 and sys.contains(x) else 0
    count += 1 if (sys._mask & 1) else 0  # n = 0
    # members with fewer digits than x (no leading zero)
    for j in range(1, len(xd)):
        count += len(lead) * nd ** (j - 1)
    # members with exactly len(xd) digits, strictly below x: walk the tight prefix
    for i, xi in enumerate(xd):
        allowed = lead if i == 0 else sys.digits
        smaller = sum(1 for d in allowed if d < xi)
        count += smaller * nd ** (len(xd) - 1 - i)
        if xi not in allowed:
            break
    return count


def enumerate_restricted(sys: DigitSystem, x: int, cap: int = ENUM_CAP) -> list[int]:
    """Strictly increasing list of all members of A(x).

    Raises CapExceeded when count_restricted(sys, x) exceeds the cap.
    Members are generated length by length: a j-digit member is a
    (j-1)-digit prefix with a nonzero leading digit, extended by any
    allowed digit.
    """
    total = count_restricted(sys, x)
    if total > cap:
        raise CapExceeded(f"|A(x)| = {total} exceeds cap {cap}")
    out = []
    if x >= 0 and (sys._mask & 1):
        out.append(0)
    level = [d for d in sys.digits if 0 < d <= x]
    while level:
        out.extend(level)
        nxt = []
        for t in level:
            base = t * sys.q
            if base > x:
                continue
            for d in sys.digits:
                v = base + d
                if v <= x:
                    nxt.append(v)
        level = sorted(nxt)
    return out


def restricted_digit_sum(sys: DigitSystem, k: int) -> int:
    """Exact sum of all k-digit-padded members (the n in [0, q^k) with
    digits in D, leading zeros allowed).  Used for Lipschitz constants."""
    nd = len(sys.digits)
    dsum = sum(sys.digits)
    total, cnt, p = 0, 1, 1
    for _ in range(k):
        total = nd * total + p * cnt * dsum
        cnt *= nd
        p *= sys.q
    return total


def prediction_constant(sys: DigitSystem) -> Fraction:
    """Heuristic constant in pi_A(x) ~ const * |A(x)|/log x.

    (|D_q|/|D|) / (phi(q)/q): the chance a member is coprime to q,
    renormalised by the same chance for unrestricted integers.  Zero when
    no allowed digit is coprime to q.
    """
    dq = len(sys.coprime_digits)
    if dq == 0:
        return Fraction(0)
    phi = _euler_phi_small(sys.q)
    return Fraction(dq, sys.size) / Fraction(phi, sys.q)


def _euler_phi_small(n: int) -> int:
    res, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            res -= res // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        res -= res // m
    return res


@dataclass(frozen=True)
class CensusReport:
    """Exact census of A(x) and its primes against the heuristic prediction."""

    x: int
    count: int
    prime_count: int
    predicted: float
    ratio: float

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "countA": self.count,
            "countPrimesA": self.prime_count,
            "predicted": self.predicted,
            "ratio": self.ratio,
        }


def census(sys: DigitSystem, x: int, enum_threshold: int = 300_000) -> CensusReport:
    """Count A(x) and its primes exactly; report the prediction ratio.

    Route selection: when A(x) is small, enumerate members and test each
    with deterministic Miller-Rabin; otherwise sieve to x and digit-filter
    the primes.
    """
    from . import primes as _primes

    count = count_restricted(sys, x)
    if count <= enum_threshold:
        members = enumerate_restricted(sys, x)
        prime_count = sum(1 for n in members if _primes.is_prime_int(n))
    else:
        table = _primes.sieve_primes(x)
        prime_count = _primes.count_primes_digit_filtered(table, x, sys)
    const = prediction_constant(sys)
    predicted = float(const) * count / math.log(x) if x >= 2 else 0.0
    ratio = prime_count / predicted if predicted > 0 else math.inf
    return CensusReport(x, count, prime_count, predicted, ratio)
