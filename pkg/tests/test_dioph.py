import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from restricta import dioph as D
from restricta.dioph import IntervalUnion, PsiFunction
from restricta.errors import CapExceeded, NotReached, Unsupported, UsageError


def sweep_measure(union: IntervalUnion, grid: int) -> float:
    """Membership sweep at grid midpoints: measure to within
    (number of intervals + 1) / grid."""
    pts = (np.arange(grid) + 0.5) / grid
    ends = union.endpoints_float()
    if len(ends) == 0:
        return 0.0
    idx = np.searchsorted(ends, pts)
    return float(np.count_nonzero(idx % 2 == 1)) / grid


fractions_01 = st.fractions(min_value=0, max_value=1)


class TestIntervalUnion:
    @given(st.lists(st.tuples(fractions_01, fractions_01), max_size=12))
    @settings(max_examples=80, deadline=None)
    def test_normalisation_invariants(self, pairs):
        pairs = [(min(a, b), max(a, b)) for a, b in pairs]
        u = IntervalUnion(pairs)
        # disjoint, sorted, non-touching after merge
        for (lo1, hi1), (lo2, hi2) in zip(u.intervals, u.intervals[1:]):
            assert hi1 < lo2
        # idempotent
        assert IntervalUnion(u.intervals) == u
        # insertion order independent
        assert IntervalUnion(reversed(pairs)) == u
        # measure is the sum of lengths, bounded by the covering interval
        assert u.measure == sum((hi - lo for lo, hi in u.intervals), Fraction(0))

    @given(
        st.lists(st.tuples(fractions_01, fractions_01), max_size=8),
        st.lists(st.tuples(fractions_01, fractions_01), max_size=8),
    )
    @settings(max_examples=60, deadline=None)
    def test_union_intersect_measures(self, p1, p2):
        u = IntervalUnion([(min(a, b), max(a, b)) for a, b in p1])
        v = IntervalUnion([(min(a, b), max(a, b)) for a, b in p2])
        inter = u.intersect(v)
        join = u.union(v)
        assert inter.measure <= min(u.measure, v.measure)
        assert join.measure <= u.measure + v.measure
        # inclusion-exclusion holds exactly for interval unions
        assert join.measure == u.measure + v.measure - inter.measure

    def test_contains(self):
        u = IntervalUnion([(Fraction(1, 4), Fraction(1, 2))])
        assert u.contains(Fraction(1, 3))
        assert u.contains(Fraction(1, 4))
        assert not u.contains(Fraction(3, 4))


class TestPsiFamilies:
    def test_parse_and_values(self):
        psi = PsiFunction.parse("power:1")
        assert psi(4) == pytest.approx(0.25)
        assert psi.exact(4) == Fraction(1, 4)
        psi = PsiFunction.parse("constant:1/2")
        assert psi.exact(7) == Fraction(1, 2)
        psi = PsiFunction.parse("khinchin:0.5")
        assert psi(10) == pytest.approx(1 / math.log(10) ** 1.5)
        assert psi(1) == 0.0

    def test_ds_definitional_values(self):
        # primorial q_3 = 6: psi0(6) = 6/(3 log 3); spread psi(3) = 9/(6*3*log 3)
        psi0 = PsiFunction.ds_base()
        psi = PsiFunction.ds_spread()
        assert psi0(6) == pytest.approx(6 / (3 * math.log(3)))
        assert psi0(5) == 0.0
        assert psi(3) == pytest.approx(9 / (6 * 3 * math.log(3)))
        assert psi(4) == 0.0  # not squarefree
        assert psi(6) == pytest.approx(36 / (6 * 3 * math.log(3)))

    def test_vectorised_matches_scalar(self):
        for psi in (
            PsiFunction.power(1.5),
            PsiFunction.constant(Fraction(2, 3)),
            PsiFunction.khinchin_threshold(0.1),
            PsiFunction.ds_base(),
            PsiFunction.ds_spread(),
            PsiFunction.from_pairs([(3, Fraction(1, 2)), (10, 2)]),
        ):
            vec = psi.values(60)
            for n in range(1, 61):
                assert vec[n - 1] == pytest.approx(psi(n), abs=1e-12), (psi.family, n)

    def test_table_zero_off_table(self):
        psi = PsiFunction.from_pairs([(5, 1)])
        assert psi(4) == 0.0 and psi(5) == 1.0

    def test_parse_errors(self):
        with pytest.raises(UsageError):
            PsiFunction.parse("nope:1")


class TestEvents:
    def test_q2_half(self):
        ev = D.event_union(2, PsiFunction.constant(Fraction(1, 2)))
        assert ev.intervals == ((Fraction(3, 8), Fraction(5, 8)),)
        assert ev.measure == Fraction(1, 4)

    def test_covering_psi(self):
        ev = D.event_union(5, PsiFunction.constant(3), reduced=False)
        assert ev.measure == 1

    def test_q6_reduced(self):
        ev = D.event_union(6, PsiFunction.constant(Fraction(1, 2)))
        assert ev.measure == Fraction(1, 18)
        assert len(ev) == 2  # windows at 1/6 and 5/6 only

    def test_q1_convention(self):
        # a = 0 and a = 1 both admitted at q = 1, clipped at the ends
        ev = D.event_union(1, PsiFunction.constant(Fraction(1, 4)))
        assert ev.measure == Fraction(1, 2)

    @given(st.integers(1, 40), st.fractions(min_value=0, max_value=3))
    @settings(max_examples=60, deadline=None)
    def test_reduced_below_full_below_cap(self, q, c):
        psi = PsiFunction.constant(c)
        reduced = D.event_union(q, psi, reduced=True).measure
        full = D.event_union(q, psi, reduced=False).measure
        assert reduced <= full <= min(Fraction(1), 2 * c / q**2 * (q + 1))

    def test_exact_measure_when_disjoint_interior(self):
        q = 7
        psi = PsiFunction.constant(Fraction(1, 100))
        ev = D.event_union(q, psi)
        phi_q = 6
        assert ev.measure == Fraction(2, 100 * 49) * phi_q

    def test_sweep_oracle_agreement(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            q = int(rng.integers(2, 50))
            c = Fraction(int(rng.integers(1, 8)), int(rng.integers(2, 30)))
            ev = D.event_union(q, PsiFunction.constant(c))
            grid = 200_000
            approx = sweep_measure(ev, grid)
            assert abs(approx - float(ev.measure)) <= (len(ev) + 1) / grid


class TestTruncatedMeasure:
    def test_empty_range(self):
        assert D.truncated_limsup_measure(PsiFunction.constant(1), 5, 5) == 0

    def test_monotone_and_subadditive(self):
        psi = PsiFunction.constant(Fraction(1, 2))
        m_34 = D.truncated_limsup_measure(psi, 2, 4)
        m_35 = D.truncated_limsup_measure(psi, 2, 5)
        assert m_35 >= m_34 >= D.event_union(2, psi).measure == Fraction(1, 4)
        total = sum((D.event_union(q, psi).measure for q in range(2, 5)), Fraction(0))
        assert m_34 <= total

    def test_select_r_example(self):
        # running exact measures: 1/2 (q=2), +4/9, +1/4 crosses 1 at q = 4
        assert D.select_R(PsiFunction.constant(1), 2) == 5

    def test_select_r_minimality_and_bound(self):
        psi = PsiFunction.constant(Fraction(3, 4))
        R = D.select_R(psi, 2)
        total = sum((D.event_union(q, psi).measure for q in range(2, R)), Fraction(0))
        prev = sum((D.event_union(q, psi).measure for q in range(2, R - 1)), Fraction(0))
        assert total >= 1 > prev
        assert total < 2  # < 1 + max single event <= 2

    def test_select_r_not_reached(self):
        with pytest.raises(NotReached):
            D.select_R(PsiFunction.constant(0), 2, cap=100)


class TestPairOverlap:
    def test_disjoint_windows(self):
        exact, pv = D.pair_overlap(3, 6, PsiFunction.constant(Fraction(1, 2)))
        assert exact == 0

    def test_tiny_psi_disjoint(self):
        exact, _ = D.pair_overlap(11, 13, PsiFunction.constant(Fraction(1, 1000)))
        assert exact == 0

    def test_exact_value_2_3(self):
        exact, pv = D.pair_overlap(2, 3, PsiFunction.constant(Fraction(1, 2)))
        assert exact == Fraction(1, 36)
        assert pv > 0

    def test_symmetry(self):
        psi = PsiFunction.constant(Fraction(2, 3))
        for (q, r) in ((2, 3), (4, 6), (5, 7), (9, 12)):
            a, _ = D.pair_overlap(q, r, psi)
            b, _ = D.pair_overlap(r, q, psi)
            assert a == b

    def test_sweep_oracle(self):
        psi = PsiFunction.constant(Fraction(1, 2))
        exact, _ = D.pair_overlap(2, 3, psi)
        inter = D.event_union(2, psi).intersect(D.event_union(3, psi))
        assert abs(sweep_measure(inter, 200_000) - float(exact)) < 5e-5

    def test_same_q_rejected(self):
        with pytest.raises(UsageError):
            D.pair_overlap(3, 3, PsiFunction.constant(1))


class TestQuasiIndependence:
    def test_no_pairs(self):
        assert D.quasi_independence_ratio(PsiFunction.constant(Fraction(1, 2)), 2, 3) == 0.0

    def test_finite_ratio(self):
        ratio = D.quasi_independence_ratio(PsiFunction.constant(Fraction(1, 2)), 2, 50)
        assert 0 < ratio < 10**6

    def test_matches_direct_computation(self):
        psi = PsiFunction.constant(Fraction(1, 2))
        Q, R = 2, 8
        events = {q: D.event_union(q, psi) for q in range(Q, R)}
        lhs = Fraction(0)
        for q in range(Q, R):
            for r in range(Q, R):
                if q != r:
                    lhs += events[q].intersect(events[r]).measure
        total = sum((ev.measure for ev in events.values()), Fraction(0))
        assert D.quasi_independence_ratio(psi, Q, R) == pytest.approx(
            float(lhs) / float(total) ** 2
        )

    def test_ds_spread_ratio_is_diagnostic(self):
        # the primorial-block ratio is finite and well below the 10^6 slack
        ratio = D.quasi_independence_ratio(PsiFunction.ds_spread(), 2, 32)
        assert 0 <= ratio < 10**6

    def test_range_cap(self):
        with pytest.raises(CapExceeded):
            D.quasi_independence_ratio(PsiFunction.constant(1), 2, 5000)


class TestClassicalApproximation:
    def test_half(self):
        fp = D.dirichlet_approx(Fraction(1, 2), 10)
        assert (fp.r, fp.s) == (1, 2)

    def test_pi_minus_three(self):
        fp = D.dirichlet_approx(math.pi - 3, 100)
        assert (fp.r, fp.s) == (1, 7)
        assert abs((math.pi - 3) - 1 / 7) < 1 / (7 * 100)

    def test_dirichlet_quality(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            alpha = float(rng.random())
            N = int(rng.integers(2, 10**4))
            fp = D.dirichlet_approx(alpha, N)
            assert fp.s <= N
            assert abs(alpha - fp.r / fp.s) < 1.0 / (fp.s * N) + 1e-15

    def test_golden_returns_fibonacci(self):
        fib = [1, 1]
        while fib[-1] < 1000:
            fib.append(fib[-1] + fib[-2])
        golden = (math.sqrt(5) - 1) / 2
        for N in (55, 89, 144, 987):
            fp = D.dirichlet_approx(golden, N)
            assert fp.s in fib and fp.r in fib
            assert fib[fib.index(fp.s) - 1] == fp.r

    def test_golden_gap_values(self):
        assert D.golden_gap(2) == pytest.approx(math.sqrt(5) * (2 - (1 + math.sqrt(5)) / 2))
        assert abs(D.golden_gap(20) - 1) < 1e-3
        # strictly closer to 1 as n grows (alternating around 1)
        assert abs(D.golden_gap(40) - 1) < abs(D.golden_gap(20) - 1)

    def test_golden_gap_range(self):
        with pytest.raises(UsageError):
            D.golden_gap(1)


class TestSeries:
    def test_harmonic(self):
        kh, _ = D.series_partial(PsiFunction.constant(1), 10**6)
        assert kh == pytest.approx(math.log(10**6) + 0.5772156649, abs=5e-4)

    def test_zeta2(self):
        kh, _ = D.series_partial(PsiFunction.power(1), 10**6)
        assert abs(kh - math.pi**2 / 6) < 1e-5

    def test_ds_weighting_reduces(self):
        # phi(n)/n < 1: the reduced series never exceeds the plain series
        for fam in (PsiFunction.constant(1), PsiFunction.ds_spread()):
            kh, ds = D.series_partial(fam, 20000)
            assert ds <= kh

    def test_ds_spread_trend(self):
        kh_small, _ = D.series_partial(PsiFunction.ds_spread(), 10**3)
        kh_large, _ = D.series_partial(PsiFunction.ds_spread(), 10**5)
        assert kh_large > kh_small  # Mertens-type growth continues


class TestDsCounterexample:
    def test_report(self):
        rep = D.ds_counterexample(10**4)
        assert rep.base_series < 3
        assert rep.spread_series > 1.5 * rep.base_series
        assert rep.still_growing
        assert rep.containment_ok
        assert rep.containments_verified > 10

    def test_small_ell(self):
        rep = D.ds_counterexample(5)
        assert rep.base_series == pytest.approx(
            1 / (2 * math.log(2)) + 1 / (3 * math.log(3)) + 1 / (5 * math.log(5))
        )
        # spread inherits prod_{p<ell}(1+1/p)
        expect = (
            1 / (2 * math.log(2))
            + (3 / 2) / (3 * math.log(3))
            + (3 / 2) * (4 / 3) / (5 * math.log(5))
        )
        assert rep.spread_series == pytest.approx(expect)

    def test_containment_is_exact_equality(self):
        # interval around a/q coincides with the one around (a q_l / q)/q_l
        q, ell = 15, 5
        q_ell = D.primorial(ell)
        assert q_ell % q == 0
        a = 2
        A = a * (q_ell // q)
        assert Fraction(a, q) == Fraction(A, q_ell)


class TestAnatomy:
    def test_y_at_least_x(self):
        assert D.anatomy_tail_count(100, 200) == 0

    def test_no_heavy_tail_at_y3(self):
        # the densest candidate 5*7*11*13*17*19 already exceeds 10^6
        assert D.anatomy_tail_count(10**6, 3) == 0

    def test_exact_against_fraction_oracle(self):
        x = 20000
        for y in (0.5, 1.0, 2.0):
            got = D.anatomy_tail_count(x, y)
            want = 0
            for n in range(2, x + 1):
                total = Fraction(0)
                m, p = n, 2
                while p * p <= m:
                    if m % p == 0:
                        if p > y:
                            total += Fraction(1, p)
                        while m % p == 0:
                            m //= p
                    p += 1
                if m > 1 and m > y:
                    total += Fraction(1, m)
                if total >= 1:
                    want += 1
            assert got == want, y


class TestHausdorff:
    def test_analytic_values(self):
        assert D.hausdorff_exponent(2) == pytest.approx(0.5)
        assert D.hausdorff_exponent(1) == pytest.approx(2 / 3)
        assert D.hausdorff_exponent(1e-9) == pytest.approx(1.0, abs=1e-8)

    def test_slope_sign_change(self):
        for a in (0.5, 1.0, 2.0):
            beta = D.hausdorff_exponent(a)
            below = D.hausdorff_slope(a, beta - 0.05)
            above = D.hausdorff_slope(a, beta + 0.05)
            assert below > 10 * above > 0

    def test_unsupported(self):
        with pytest.raises(Unsupported):
            D.hausdorff_exponent_for(PsiFunction.constant(1))
        with pytest.raises(Unsupported):
            D.hausdorff_exponent(0)
