import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primesum.errors import DomainError
from primesum.ntheory import (
    factorize,
    primorial,
    sieve_primes,
    split_by_threshold,
)

from oracles import brute_phi, trial_primes


class TestSievePrimes:
    def test_ten(self):
        assert sieve_primes(10).primes.tolist() == [2, 3, 5, 7]

    def test_boundary_two(self):
        assert sieve_primes(2).primes.tolist() == [2]

    def test_thirty(self):
        table = sieve_primes(30)
        assert table.primes.size == 10
        assert int(table.primes[-1]) == 29

    def test_below_two_rejected(self):
        with pytest.raises(DomainError):
            sieve_primes(1)

    def test_membership(self):
        table = sieve_primes(100)
        assert 97 in table
        assert 91 not in table
        assert 1 not in table

    @given(st.integers(min_value=2, max_value=2000))
    def test_matches_trial_division(self, n):
        assert sieve_primes(n).primes.tolist() == trial_primes(n)

    def test_segmented_agrees_with_simple(self):
        # The segmented path only engages above its threshold; compare the
        # two code paths on a window around it via the module internals.
        from primesum.ntheory import _segmented_sieve, _simple_sieve

        n = 1 << 21
        assert np.array_equal(_segmented_sieve(n), _simple_sieve(n))


class TestPrimorial:
    def test_w5(self):
        mod = primorial(5)
        assert mod.m == 30
        assert mod.totient == 8
        assert mod.prime_divisors == (2, 3, 5)

    def test_w2_boundary(self):
        mod = primorial(2)
        assert mod.m == 2
        assert mod.totient == 1

    def test_w11(self):
        mod = primorial(11)
        assert mod.m == 2310
        assert mod.totient == 480

    def test_below_two_rejected(self):
        with pytest.raises(DomainError):
            primorial(1)

    @given(st.integers(min_value=2, max_value=13))
    def test_against_direct_product(self, w):
        mod = primorial(w)
        ps = trial_primes(w)
        expected = 1
        for p in ps:
            expected *= p
        assert mod.m == expected
        assert mod.totient == brute_phi(expected)
        assert mod.squarefree


class TestFactorize:
    def test_thirty(self):
        mod = factorize(30)
        assert mod.prime_divisors == (2, 3, 5)
        assert mod.totient == 8
        assert mod.squarefree

    def test_twelve(self):
        mod = factorize(12)
        assert mod.primes == ((2, 2), (3, 1))
        assert mod.totient == 4
        assert mod.radical == 6
        assert not mod.squarefree

    def test_one(self):
        mod = factorize(1)
        assert mod.primes == ()
        assert mod.totient == 1
        assert mod.radical == 1

    @given(st.integers(min_value=1, max_value=10000))
    def test_reconstruction_and_phi(self, m):
        mod = factorize(m)
        prod = 1
        for p, e in mod.primes:
            prod *= p**e
        assert prod == m
        assert mod.totient == brute_phi(m)

    def test_divisors_of_30(self):
        assert sorted(factorize(30).divisors()) == [
            1, 2, 3, 5, 6, 10, 15, 30,
        ]


class TestSplitByThreshold:
    def test_m210_t6(self):
        small, large = split_by_threshold(factorize(210), 6)
        assert small.m == 30
        assert large.m == 7

    def test_empty_small(self):
        small, large = split_by_threshold(factorize(30), 1)
        assert small.m == 1
        assert large.m == 30

    def test_empty_large(self):
        small, large = split_by_threshold(factorize(30), 5)
        assert small.m == 30
        assert large.m == 1

    def test_requires_squarefree(self):
        with pytest.raises(DomainError):
            split_by_threshold(factorize(12), 2)

    @given(st.integers(min_value=1, max_value=300))
    def test_parts_multiply_back(self, t):
        mod = factorize(2 * 3 * 5 * 7 * 11)
        small, large = split_by_threshold(mod, t)
        assert small.m * large.m == mod.m
        assert all(p <= t for p in small.prime_divisors)
        assert all(p > t for p in large.prime_divisors)
