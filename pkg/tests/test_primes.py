import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from restricta import primes as P
from restricta.errors import FactorizationTooHard, LimitExceeded, OutOfRange


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def mobius_oracle(n: int) -> int:
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    return -res if m > 1 else res


class TestSieve:
    def test_agrees_with_trial_division(self, table_1e4):
        for n in range(10**4 + 1):
            assert table_1e4.is_prime(n) == trial_division_is_prime(n), n

    def test_pi_values(self, table_1e6):
        assert table_1e6.pi(100) == 25
        assert table_1e6.pi(2) == 1
        assert table_1e6.pi(10**6) == 78498

    def test_pi_matches_independent_sieve(self, table_1e6):
        flags = np.ones(10**6 + 1, dtype=bool)
        flags[:2] = False
        for p in range(2, 1001):
            if flags[p]:
                flags[p * p :: p] = False
        counts = np.cumsum(flags)
        for x in (10, 97, 5000, 524_288, 999_983, 10**6):
            assert table_1e6.pi(x) == int(counts[x])

    def test_segment_boundaries(self, table_1e6):
        # limits straddling the 2^20 segment edge
        reference = table_1e6.pi(10**6)
        for lim in (2**20 - 1, 2**20, 2**20 + 1):
            t = P.sieve_primes(lim)
            assert t.pi(10**6) == reference
            assert t.is_prime(1_048_573)  # prime just below 2^20
        t = P.sieve_primes(2**20 + 100)
        ps = t.primes()
        assert int(ps[-1]) <= 2**20 + 100
        assert all(trial_division_is_prime(int(p)) for p in ps[-5:])

    def test_limits(self):
        with pytest.raises(LimitExceeded):
            P.sieve_primes(2**40 + 1)
        with pytest.raises(OutOfRange):
            P.sieve_primes(100).pi(101)


class TestCountAp:
    def test_examples(self, table_1e4):
        assert P.count_primes_ap(table_1e4, 100, 4, 1) == 11
        assert P.count_primes_ap(table_1e4, 100, 4, 0) == 0
        assert P.count_primes_ap(table_1e4, 100, 2, 0) == 1

    @given(st.integers(1, 12), st.integers(10, 5000))
    @settings(max_examples=30, deadline=None)
    def test_partition_over_residues(self, q, x):
        table = P.sieve_primes(max(x, 2))
        total = sum(P.count_primes_ap(table, x, q, a) for a in range(q))
        assert total == table.pi(x)


class TestRamanujan:
    def test_examples(self):
        assert P.ramanujan_sum(1).real == pytest.approx(1)
        assert abs(P.ramanujan_sum(4)) < 1e-12
        assert P.ramanujan_sum(6).real == pytest.approx(1)

    def test_equals_mobius_up_to_500(self):
        for s in range(1, 501):
            val = P.ramanujan_sum(s)
            assert abs(val.imag) < 1e-9
            assert abs(val.real - mobius_oracle(s)) < 1e-6, s
            assert round(val.real) == P.mobius(s)


class TestPrimeExpSum:
    def test_at_zero(self, table_1e4):
        assert P.prime_exp_sum(table_1e4, 100, 0.0) == pytest.approx(25 + 0j)

    def test_at_half(self, table_1e4):
        # e(p/2) = -1 for odd p, +1 for p = 2
        v = P.prime_exp_sum(table_1e4, 100, 0.5)
        assert v.real == pytest.approx(2 - 25)
        assert abs(v.imag) < 1e-12

    def test_near_ramanujan_prediction(self, table_1e6):
        v = P.prime_exp_sum(table_1e6, 10**6, 1.0 / 3.0)
        target = -table_1e6.pi(10**6) / 2
        assert abs(v - target) / abs(target) < 0.05

    def test_magnitude_bound(self, table_1e4):
        for theta in (0.123, 0.618, 0.95):
            assert abs(P.prime_exp_sum(table_1e4, 10**4, theta)) <= table_1e4.pi(10**4)

    @given(st.integers(0, 2**20 - 1))
    @settings(max_examples=25, deadline=None)
    def test_period_one(self, num):
        # dyadic theta so that theta + 1 is exactly representable
        table = _SHARED["t"]
        theta = num / 2**20
        a = P.prime_exp_sum(table, 5000, theta)
        b = P.prime_exp_sum(table, 5000, theta + 1.0)
        assert abs(a - b) < 1e-9

    @given(st.integers(-(2**20), 2**20))
    @settings(max_examples=25, deadline=None)
    def test_conjugate_symmetry(self, num):
        table = _SHARED["t"]
        theta = num / 2**20
        a = P.prime_exp_sum(table, 5000, theta)
        b = P.prime_exp_sum(table, 5000, -theta)
        assert abs(a.conjugate() - b) < 1e-9

    def test_out_of_range(self, table_1e4):
        with pytest.raises(OutOfRange):
            P.prime_exp_sum(table_1e4, 10**5, 0.1)


_SHARED = {}


def setup_module():
    _SHARED["t"] = P.sieve_primes(5000)


class TestSpectrum:
    def test_direct_and_fft_paths_agree(self, table_1e4):
        N = 720
        direct = P.prime_spectrum(table_1e4, N, direct_cap=10**6)
        fft = P.prime_spectrum(table_1e4, N, direct_cap=1)
        assert np.max(np.abs(direct - fft)) < 1e-8

    def test_value_at_zero_is_pi(self, table_1e4):
        N = 1000
        spec = P.prime_spectrum(table_1e4, N)
        assert spec[0].real == pytest.approx(table_1e4.pi(N))


class TestVinogradov:
    def test_formula_instantiation(self):
        v = P.vinogradov_reference(10**6, 1, 1)
        assert v == pytest.approx((10**4.8 + 10**6) * math.log(10**6) ** 4)
        v2 = P.vinogradov_reference(10**6, 10**3, 10**3)
        assert v2 == pytest.approx((10**4.8 + 10**3) * math.log(10**6) ** 4)

    @given(
        st.floats(1, 1e9), st.floats(1, 1e6), st.floats(1, 1e6), st.floats(1, 8)
    )
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_bs(self, N, S, B, factor):
        base = P.vinogradov_reference(N, S, B)
        assert P.vinogradov_reference(N, S * factor, B) <= base + 1e-9 * abs(base)
        assert P.vinogradov_reference(N, S, B * factor) <= base + 1e-9 * abs(base)


class TestFactorization:
    @given(st.integers(1, 10**9))
    @settings(max_examples=60, deadline=None)
    def test_recomposition(self, n):
        fac = P.factorize(n)
        prod = 1
        for p, e in fac.items():
            assert P.is_prime_int(p)
            prod *= p**e
        assert prod == n

    def test_hard_composite_refused(self):
        p1, p2 = 1_000_003, 1_000_033
        assert P.is_prime_int(p1) and P.is_prime_int(p2)
        with pytest.raises(FactorizationTooHard):
            P.factorize(p1 * p2, trial_limit=10**3)

    def test_mr_agrees_with_table(self, table_1e4):
        for n in range(2, 2000):
            assert P.is_prime_int(n) == table_1e4.is_prime(n)

    def test_phi_sieve_matches_euler_phi(self):
        phi = P.phi_sieve(500)
        for n in range(1, 501):
            assert int(phi[n]) == P.euler_phi(n)
