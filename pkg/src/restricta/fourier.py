"""Exponential sums over digit-restricted sets and their certified bounds.

S_A(theta) factors as a product of k single-digit window sums, which makes
every mean, moment and maximum here computable in O(k) per point.  The
"computer calculation" style inequalities (the sin-bound sum, the refined
per-digit sum, the pairwise sum, the generalization margin) are evaluated
as certified upper bounds: grid maxima carry explicit Lipschitz padding
and sums accumulate a small per-term upward slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .digit_systems import DigitSystem, restricted_digit_sum
from .errors import CapExceeded, UsageError, WrongShape
from .numutil import catalan_constant, e1, frac_exact, frac_mul, fsum_chunks, unit

TAU_DEFAULT = 0.2 - 1e-9
SLACK = 1e-12  # per-term upward slack in certified accumulations
MEAN_CAP = 10**8
MOMENT_CAP = 10**7
_CHUNK = 1 << 17
# |e(phi) - 1| below this is phase-roundoff noise; the geometric forms
# switch to their limit value (the sliver affected is ~1e-10 wide, where
# the analytic cell caps govern certified maxima anyway)
_DEN_EPS = 1e-9


@dataclass(frozen=True)
class FourierProfile:
    """A digit system observed at k digits, so N = q^k."""

    sys: DigitSystem
    k: int
    tau: float = TAU_DEFAULT

    def __post_init__(self):
        if self.k < 1:
            raise UsageError("need k >= 1")
        if not self.tau < 0.2:
            raise UsageError("tau must be < 1/5")

    @property
    def n_points(self) -> int:
        return self.sys.q**self.k

    @property
    def set_size(self) -> int:
        """|A(N)| for the k-digit padded set."""
        return self.sys.size**self.k


@dataclass(frozen=True)
class BoundReport:
    kind: str
    value: float
    threshold: float
    passes: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "threshold": self.threshold,
            "passes": self.passes,
            **{k: v for k, v in self.details.items()},
        }


# ----------------------------------------------------------------- windows


class _Window:
    """Structure-aware evaluation of W(phi) = sum_{d in D} e(d*phi).

    Picks the cheapest exact form: geometric closed form for the full set
    or a consecutive run, full-minus-removed for dense sets, direct
    summation otherwise.
    """

    def __init__(self, sys: DigitSystem):
        self.sys = sys
        q, D = sys.q, sys.digits
        self.removed = sys.missing()
        if len(D) == D[-1] - D[0] + 1:
            self.kind = "run"
            self.run_start, self.run_len = D[0], len(D)
        elif len(self.removed) < len(D):
            self.kind = "removed"
        else:
            self.kind = "direct"
        ds = sorted(D)
        med = ds[len(ds) // 2]
        self.lip_global = 2.0 * math.pi * sum(abs(d - med) for d in ds)
        rem = sorted(self.removed)
        self.removed_center = rem[len(rem) // 2] if rem else 0
        self.lip_removed_tail = 2.0 * math.pi * sum(abs(b - self.removed_center) for b in rem)
        self.q = q

    # -- complex values ---------------------------------------------------

    def _geom(self, phases_num, phases_den, length):
        """(e(length*phi)-1)/(e(phi)-1) with the phi->0 limit length."""
        num = unit(phases_num) - 1.0
        den = unit(phases_den) - 1.0
        small = np.abs(den) < _DEN_EPS
        out = np.where(small, length + 0j, num / np.where(small, 1.0, den))
        # exact zeros of the numerator survive: num=0, den!=0 gives 0
        return out

    def values(self, phi: np.ndarray) -> np.ndarray:
        """Complex W at float phases (already reduced mod 1 or not; e() is periodic)."""
        phi = np.asarray(phi, dtype=np.float64)
        q = self.q
        if self.kind == "run":
            r, c = self.run_len, self.run_start
            base = self._geom((r * phi) % 1.0, phi % 1.0, r)
            return unit((c * phi) % 1.0) * base
        if self.kind == "removed":
            g = self._geom((q * phi) % 1.0, phi % 1.0, q)
            for b in self.removed:
                g = g - unit((b * phi) % 1.0)
            return g
        acc = np.zeros(phi.shape, dtype=np.complex128)
        for d in self.sys.digits:
            acc += unit((d * phi) % 1.0)
        return acc

    def values_at_fractions(self, m: np.ndarray, N: int) -> np.ndarray:
        """Complex W at phi = m/N using exact integer phase reduction."""
        m = np.asarray(m, dtype=np.int64)
        q = self.q
        if self.kind == "run":
            r, c = self.run_len, self.run_start
            base = self._geom((r * m % N) / N, (m % N) / N, r)
            return unit((c * m % N) / N) * base
        if self.kind == "removed":
            g = self._geom((q * m % N) / N, (m % N) / N, q)
            for b in self.removed:
                g = g - unit((b * m % N) / N)
            return g
        acc = np.zeros(m.shape, dtype=np.complex128)
        for d in self.sys.digits:
            acc += unit((d * m % N) / N)
        return acc

    def derivative_at_fractions(self, m: np.ndarray, N: int) -> np.ndarray:
        """W'(phi) = 2*pi*i * sum_d d*e(d*phi) at phi = m/N, exact phases."""
        m = np.asarray(m, dtype=np.int64)
        q = self.q
        tp = 2j * math.pi
        if self.kind in ("run", "removed"):
            start, length = (self.run_start, self.run_len) if self.kind == "run" else (0, q)
            zN = unit((length * m % N) / N)
            z1 = unit((m % N) / N)
            den = z1 - 1.0
            small = np.abs(den) < _DEN_EPS
            safe = np.where(small, 1.0, den)
            g = np.where(small, length + 0j, (zN - 1.0) / safe)
            gp = np.where(
                small,
                tp * length * (length - 1) / 2.0,
                tp * (length * zN * den - (zN - 1.0) * z1) / (safe * safe),
            )
            shift = unit((start * m % N) / N)
            out = shift * (gp + tp * start * g)
            if self.kind == "removed":
                for b in self.removed:
                    out = out - tp * b * unit((b * m % N) / N)
            return out
        acc = np.zeros(m.shape, dtype=np.complex128)
        for d in self.sys.digits:
            acc += d * unit((d * m % N) / N)
        return tp * acc

    # -- certified cell suprema -------------------------------------------

    def cell_caps(self, dmin: np.ndarray) -> np.ndarray:
        """Analytic cap on F over a cell at distance >= dmin from integers."""
        nd = float(self.sys.size)
        with np.errstate(divide="ignore"):
            inv_sin = np.where(dmin > 0, 1.0 / np.sin(np.pi * np.maximum(dmin, 1e-300)), np.inf)
        if self.kind == "run":
            return np.minimum(nd, inv_sin)
        if self.kind == "removed":
            return np.minimum(nd, len(self.removed) + inv_sin)
        return np.full_like(dmin, nd)

    def cell_lipschitz(self, dmin: np.ndarray) -> np.ndarray:
        """Per-cell bound on |dF/dphi|, local where the structure allows."""
        q = self.q
        with np.errstate(divide="ignore"):
            s = 2.0 * np.sin(np.pi * np.maximum(dmin, 1e-300))
            s = np.where(dmin > 0, s, np.nan)
            if self.kind == "run":
                # |d|ratio|/dphi| <= 2*pi*(r/s + 2/s^2); shift phase drops out
                r = self.run_len
                local = 2.0 * math.pi * (r / s + 2.0 / (s * s))
            elif self.kind == "removed":
                # F = |e(-c*phi)(g - h)| with c the centre of the removed set:
                # |g'| + 2*pi*c*|g| + |recentred h'|
                c = self.removed_center
                local = (
                    2.0 * math.pi * (q / s + 2.0 / (s * s) + 2.0 * c / s)
                    + self.lip_removed_tail
                )
            else:
                local = np.full_like(s, np.inf)
        local = np.where(np.isnan(local), np.inf, local)
        return np.minimum(local, self.lip_global)

    def cell_sup(self, lows: np.ndarray, width: float, grid: int, chunk: int = 4) -> np.ndarray:
        """Certified upper bound for sup F over each cell [low, low+width].

        Inclusive grid maxima plus Lipschitz half-step padding, capped by
        the analytic per-cell bound and by |D|.
        """
        lows = np.asarray(lows, dtype=np.float64)
        best = np.zeros(len(lows))
        for g0 in range(0, grid + 1, chunk):
            gs = np.arange(g0, min(g0 + chunk, grid + 1), dtype=np.float64)
            phi = lows[:, None] + (gs[None, :] / grid) * width
            vals = np.abs(self.values(phi))
            np.maximum(best, vals.max(axis=1), out=best)
        dmin = np.clip(np.minimum(lows, 1.0 - lows - width), 0.0, None)
        pad = self.cell_lipschitz(dmin) * (width / grid) / 2.0
        capped = np.minimum(best + pad, self.cell_caps(dmin))
        return np.minimum(capped, float(self.sys.size))


def digit_window_sum(sys: DigitSystem, phi: float) -> float:
    """F_D(phi) = |sum_{d in D} e(d*phi)|, direct summation."""
    acc = 0j
    for d in sys.digits:
        acc += e1(frac_exact(d, float(phi)))
    return abs(acc)


def sin_bound(sys: DigitSystem, phi: float) -> float:
    """min{q-1, 1 + 1/sin(pi*||phi||)} for a one-missing-digit set."""
    if sys.size != sys.q - 1:
        raise WrongShape("sin bound applies to exactly one missing digit")
    f = float(phi) % 1.0
    dist = min(f, 1.0 - f)
    if dist <= 0.0:
        return float(sys.q - 1)
    return min(float(sys.q - 1), 1.0 + 1.0 / math.sin(math.pi * dist))


# ------------------------------------------------------- the product form


def restricted_exp_sum(profile: FourierProfile, theta) -> complex:
    """S_A(theta) over the k-digit padded set, via the digit product.

    theta may be a float or an exact Fraction; phases q^i*theta mod 1 are
    reduced exactly in integer arithmetic either way, so the product stays
    accurate for any k.
    """
    sys = profile.sys
    if isinstance(theta, Fraction):
        num, den = theta.numerator, theta.denominator
    else:
        num, den = float(theta).as_integer_ratio()
    res = 1 + 0j
    qq = 1
    for _ in range(profile.k):
        ph = ((qq * num) % den) / den
        w = 0j
        for d in sys.digits:
            w += e1(frac_exact(d, ph))
        res *= w
        qq *= sys.q
    return res


def sa_chunks(profile: FourierProfile, chunk: int = _CHUNK):
    """Yield (j0, S_A(j/N) for j in [j0, j0+chunk)) over the full grid."""
    sys, k = profile.sys, profile.k
    N = profile.n_points
    win = _Window(sys)
    powers = [pow(sys.q, i, N) for i in range(k)]
    for j0 in range(0, N, chunk):
        j = np.arange(j0, min(j0 + chunk, N), dtype=np.int64)
        acc = np.ones(len(j), dtype=np.complex128)
        for qi in powers:
            acc *= win.values_at_fractions(j * qi % N, N)
        yield j0, acc


def sa_grid(profile: FourierProfile) -> np.ndarray:
    """S_A(j/N) for all j; materialises the full array (N <= 10^7)."""
    N = profile.n_points
    if N > MOMENT_CAP:
        raise CapExceeded(f"grid of size {N} above cap {MOMENT_CAP}")
    out = np.empty(N, dtype=np.complex128)
    for j0, vals in sa_chunks(profile):
        out[j0 : j0 + len(vals)] = vals
    return out


def sa_derivative_chunks(profile: FourierProfile, chunk: int = _CHUNK):
    """Yield (j0, S_A'(j/N)) using the product rule with prefix/suffix
    partial products (exact derivative of the product form)."""
    sys, k = profile.sys, profile.k
    N = profile.n_points
    win = _Window(sys)
    for j0 in range(0, N, chunk):
        j = np.arange(j0, min(j0 + chunk, N), dtype=np.int64)
        W = []
        Wd = []
        for i in range(k):
            m = j * pow(sys.q, i, N) % N
            W.append(win.values_at_fractions(m, N))
            Wd.append(win.derivative_at_fractions(m, N))
        prefix = np.ones(len(j), dtype=np.complex128)
        prefixes = []
        for i in range(k):
            prefixes.append(prefix)
            prefix = prefix * W[i]
        suffix = np.ones(len(j), dtype=np.complex128)
        deriv = np.zeros(len(j), dtype=np.complex128)
        for i in range(k - 1, -1, -1):
            deriv += (sys.q**i) * Wd[i] * prefixes[i] * suffix
            suffix = suffix * W[i]
        yield j0, deriv


# --------------------------------------------------- certified bound sums


def sin_display_value(q: int) -> float:
    """The closed-form per-digit bound sum for one missing digit:
    3q-4 + 2*sum_{1<=t<(q-1)/2} 1/sin(pi t/q) + [q odd]/sin(pi(q-1)/2q)."""
    t_hi = int(math.ceil((q - 1) / 2 - 1e-12))
    t = np.arange(1, t_hi, dtype=np.float64)
    val = 3.0 * q - 4.0 + 2.0 * float(np.sum(1.0 / np.sin(np.pi * t / q)))
    terms = len(t) + 1
    if (q - 1) % 2 == 0:
        val += 1.0 / math.sin(math.pi * (q - 1) / (2 * q))
        terms += 1
    return val + SLACK * terms


def sin_bound_sum(q: int, tau: float = TAU_DEFAULT) -> BoundReport:
    """Compare the per-digit sin-bound sum against (q-1)*q^tau."""
    if q < 3:
        raise UsageError("need q >= 3")
    value = sin_display_value(q)
    threshold = (q - 1) * q**tau
    return BoundReport(
        "sin-bound-sum",
        value,
        threshold,
        value < threshold,
        {"asymptotic_reference": (2.0 / math.pi) * q * math.log(q)},
    )


def refined_digit_sum(q: int, grid: int = 512, tau: float = TAU_DEFAULT) -> BoundReport:
    """Per-digit bound from the true window maxima.

    For every missing digit b, sums over t the certified supremum of
    F_D over [t/q, (t+1)/q); reports the worst b.  Cell suprema are grid
    maxima with local Lipschitz padding, never exceeding the sin-bound
    cell values.  The geometric kernel is evaluated once for all b; the
    missing-digit phase advances by elementwise multiplication.
    """
    if q < 3:
        raise UsageError("need q >= 3")
    t = np.arange(q, dtype=np.float64)
    eta = np.arange(grid + 1, dtype=np.float64) / grid
    phi = (t[:, None] + eta[None, :]) / q  # (q, grid+1) covering each cell
    z1 = unit(phi)
    zq = unit(eta)[None, :] * np.ones((q, 1))  # e(q*phi) = e(t + eta) = e(eta)
    den = z1 - 1.0
    small = np.abs(den) < _DEN_EPS
    g = np.where(small, q + 0j, (zq - 1.0) / np.where(small, 1.0, den))
    # per-cell distance to the nearest integer and the sin-bound cell cap
    dmin = np.minimum(t, q - 1 - t) / q
    with np.errstate(divide="ignore"):
        caps = np.where(dmin > 0, 1.0 + 1.0 / np.sin(np.pi * np.maximum(dmin, 1e-300)), np.inf)
    caps = np.minimum(caps, float(q - 1))
    with np.errstate(divide="ignore"):
        s = np.where(dmin > 0, 2.0 * np.sin(np.pi * np.maximum(dmin, 1e-300)), np.nan)
        lip_geom = 2.0 * math.pi * (q / s + 2.0 / (s * s))
    halfstep = 1.0 / (q * grid) / 2.0
    per_digit = []
    eb = np.ones_like(z1)  # e(b*phi), advanced multiplicatively over b
    for b in range(q):
        gridmax = np.abs(g - eb).max(axis=1)
        sys_b = DigitSystem.excluding(q, {b})
        lip_glob = _Window(sys_b).lip_global
        lip = np.minimum(np.nan_to_num(lip_geom + 2.0 * math.pi * 2.0 * b / s, nan=np.inf), lip_glob)
        sups = np.minimum(np.minimum(gridmax + lip * halfstep, caps), float(q - 1))
        per_digit.append(float(np.sum(sups)) + SLACK * q)
        eb = eb * z1
    value = max(per_digit)
    threshold = (q - 1) * q**tau
    return BoundReport(
        "refined-sum",
        value,
        threshold,
        value < threshold,
        {"per_digit": per_digit, "grid": grid},
    )


def pairwise_display_value(q: int) -> float:
    """The closed-form two-digit bound sum:
    (3q-4)^2 + (2*sum 1/sin(pi t/q) + ...)(6q-8 + 2*sum sin(pi u/q) + ...)."""
    t_hi = int(math.ceil((q - 1) / 2 - 1e-12))
    t = np.arange(1, t_hi, dtype=np.float64)
    f1 = 2.0 * float(np.sum(1.0 / np.sin(np.pi * t / q)))
    u = np.arange(2, q // 2 + 1, dtype=np.float64)
    f2 = 6.0 * q - 8.0 + 2.0 * float(np.sum(np.sin(np.pi * u / q)))
    terms = len(t) + len(u) + 2
    if (q - 1) % 2 == 0:
        f1 += 1.0 / math.sin(math.pi * (q - 1) / (2 * q))
        f2 += math.sin(math.pi * (q + 1) / (2 * q))
        terms += 2
    return (3.0 * q - 4.0) ** 2 + f1 * f2 + SLACK * terms


def pairwise_bound_sum(q: int) -> BoundReport:
    """Compare the paired-digit bound sum against (q-1)^2 * q^(2/5)."""
    if q < 5:
        raise UsageError("need q >= 5")
    value = pairwise_display_value(q)
    threshold = (q - 1) ** 2 * q**0.4
    return BoundReport("pairwise-sum", value, threshold, value < threshold, {})


def scan_bound(kind: str, q_lo: int, q_hi: int, tau: float = TAU_DEFAULT):
    """Yield BoundReports over q in [q_lo, q_hi], with q attached."""
    for q in range(q_lo, q_hi + 1):
        if kind == "sin-sum":
            rep = sin_bound_sum(q, tau)
        elif kind == "pairwise":
            rep = pairwise_bound_sum(q)
        else:
            raise UsageError(f"unknown scan kind {kind!r}")
        yield q, rep


def minimal_passing_q(kind: str, q_lo: int, q_hi: int, tau: float = TAU_DEFAULT) -> int | None:
    """First q in the window whose bound sum passes its threshold."""
    for q, rep in scan_bound(kind, q_lo, q_hi, tau):
        if rep.passes:
            return q
    return None


def generalized_margin(sys: DigitSystem, grid: int = 256, tau_exp: float = 0.2) -> BoundReport:
    """sum_t sup over [t/q, (t+1)/q) of F_D, against (q - |D|) * q^(1/5).

    Degenerate for the full digit set (threshold 0).  Details carry the
    analytic reference shapes for removed-digit and consecutive-run sets.
    """
    q = sys.q
    win = _Window(sys)
    lows = np.arange(q, dtype=np.float64) / q
    sups = win.cell_sup(lows, 1.0 / q, grid)
    value = float(np.sum(sups)) + SLACK * q * (grid + 1)
    r = q - sys.size
    threshold = r * q**tau_exp
    details: dict = {"grid": grid, "degenerate": r == 0}
    if r >= 1:
        details["removed_reference"] = (q - 1.0) * r + q * math.log(q)
    if win.kind == "run" and sys.size >= 2:
        details["consecutive_reference"] = (q / sys.size) * (q - sys.size) * math.log(sys.size)
    passes = (r > 0) and (value < threshold)
    return BoundReport("margin", value, threshold, passes, details)


# ------------------------------------------------------- means and moments


def mean_l1(profile: FourierProfile) -> float:
    """sum_{j=0}^{N-1} |S_A(j/N)|, exact grid sum (not normalised)."""
    if profile.n_points > MEAN_CAP:
        raise CapExceeded(f"N = {profile.n_points} above cap {MEAN_CAP}")
    parts = [fsum_chunks(np.abs(vals)) for _, vals in sa_chunks(profile)]
    return math.fsum(parts)


def mean_l1_derivative(profile: FourierProfile) -> float:
    """(1/N) * sum_j |S_A'(j/N)|, the grid mean of the derivative."""
    if profile.n_points > MEAN_CAP:
        raise CapExceeded(f"N = {profile.n_points} above cap {MEAN_CAP}")
    parts = [fsum_chunks(np.abs(vals)) for _, vals in sa_derivative_chunks(profile)]
    return math.fsum(parts) / profile.n_points


def power_sum(profile: FourierProfile, sigma: float) -> float:
    """sum_j |S_A(j/N)|^sigma over the full grid."""
    if profile.n_points > MOMENT_CAP:
        raise CapExceeded(f"N = {profile.n_points} above cap {MOMENT_CAP}")
    parts = [fsum_chunks(np.abs(vals) ** sigma) for _, vals in sa_chunks(profile)]
    return math.fsum(parts)


def moment_tail(profile: FourierProfile, sigma: float, T: float) -> tuple[int, float]:
    """Exceedance count #{j : |S_A(j/N)| >= A(N)/T} and its moment bound
    (T/A)^sigma * sum_j |S_A|^sigma.  The count never exceeds the bound."""
    if sigma <= 0 or T < 1:
        raise UsageError("need sigma > 0 and T >= 1")
    if profile.n_points > MOMENT_CAP:
        raise CapExceeded(f"N = {profile.n_points} above cap {MOMENT_CAP}")
    A = float(profile.set_size)
    cut = A / T
    count = 0
    msum_parts = []
    for _, vals in sa_chunks(profile):
        mags = np.abs(vals)
        count += int(np.count_nonzero(mags >= cut))
        msum_parts.append(fsum_chunks(mags**sigma))
    bound = (T / A) ** sigma * math.fsum(msum_parts)
    return count, bound


def farey_max_sum(profile: FourierProfile, S: int, xi: float, grid: int = 512) -> float:
    """sum over reduced r/s, s <= S, of max_{|eta|<=1/(4S^2)} |S_A(r/s+xi+eta)|.

    Grid maxima with Lipschitz padding 2*pi*(sum of members) * halfstep.
    """
    if S < 1:
        raise UsageError("need S >= 1")
    if S * S > profile.n_points:
        raise CapExceeded("window scale 1/(4S^2) below grid resolution q^-k")
    sys, k = profile.sys, profile.k
    win = _Window(sys)
    delta = 1.0 / (4.0 * S * S)
    lip = 2.0 * math.pi * float(restricted_digit_sum(sys, k))
    pad = lip * (2.0 * delta / grid) / 2.0
    eta = np.linspace(-delta, delta, grid + 1)
    total = []
    for s in range(1, S + 1):
        for r in range(s):
            if math.gcd(r, s) != 1:
                continue
            theta = eta + (r / s + xi)
            acc = np.ones(len(theta), dtype=np.complex128)
            for i in range(k):
                acc *= win.values(frac_mul(theta, float(sys.q**i)))
            total.append(float(np.max(np.abs(acc))) + pad)
    return math.fsum(total) + SLACK * len(total)


# ------------------------------------------------------------- constants


def typical_growth_constant(pairs: int = 200_000) -> float:
    """exp((4/pi) * G) with Catalan's G from its series; the per-digit
    growth factor of |S_A| at a typical theta, approx 3.209912300."""
    return math.exp(4.0 * catalan_constant(pairs) / math.pi)
