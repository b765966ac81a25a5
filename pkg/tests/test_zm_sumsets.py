import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primesum.errors import DomainError
from primesum.ntheory import factorize, primorial
from primesum.zm_sumsets import (
    SubsetOfZm,
    capital_R,
    choose_moment_order,
    ck_series,
    collision_stats,
    cyclic_sumset_size,
    divisor_stratification,
    extremal_construct,
    holder_lower_bound,
    implied_constant_trend,
    integer_sumset,
    kth_moment,
    mertens_ratio,
    rep_histogram,
    sumset,
    tail_count,
    znstar_certificate,
)

from oracles import (
    collision_weight,
    int_sumset_enum,
    relaxed_rep_enum,
    rep_enum,
    sumset_enum,
    trial_primes,
    units_of,
)


def member_sets(m, max_size=16):
    return st.sets(st.integers(min_value=0, max_value=m - 1), max_size=max_size)


class TestSubsetOfZm:
    def test_roundtrip(self):
        b = SubsetOfZm.from_members(10, [1, 3, 7])
        assert b.members_array().tolist() == [1, 3, 7]
        assert b.cardinality == 3
        assert 3 in b
        assert 4 not in b

    def test_units(self):
        assert SubsetOfZm.units(10).members_array().tolist() == [1, 3, 7, 9]

    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            SubsetOfZm.from_members(10, [10])


class TestSumset:
    def test_hand_count(self):
        b = SubsetOfZm.from_members(10, [1, 3])
        assert sumset(b, b).members_array().tolist() == [2, 4, 6]

    def test_empty(self):
        e = SubsetOfZm.from_members(10, [])
        assert sumset(e, e).cardinality == 0

    def test_units_of_30(self):
        b = SubsetOfZm.units(30)
        got = set(sumset(b, b).members_array().tolist())
        assert got == sumset_enum(b.members_array().tolist(), 30)

    @given(st.integers(min_value=2, max_value=128), st.data())
    def test_matches_enumeration(self, m, data):
        members = data.draw(member_sets(m))
        b = SubsetOfZm.from_members(m, sorted(members))
        got = set(sumset(b, b).members_array().tolist())
        assert got == sumset_enum(members, m)

    @given(st.integers(min_value=2, max_value=200), st.data())
    def test_cyclic_size_agrees(self, m, data):
        members = np.asarray(sorted(data.draw(member_sets(m))), dtype=np.int64)
        b = SubsetOfZm.from_members(m, members)
        assert cyclic_sumset_size(members, m) == sumset(b, b).cardinality


class TestIntegerSumset:
    def test_hand_count(self):
        assert integer_sumset([1, 3], [1, 3]) == {2, 4, 6}

    def test_identity(self):
        s = {4, 9, 11}
        assert integer_sumset([0], s) == s

    def test_primes_one_mod_six(self):
        primes = [q for q in trial_primes(100) if q % 6 == 1]
        total = integer_sumset(primes, primes)
        assert all(x % 6 == 2 for x in total)
        assert total == int_sumset_enum(primes, primes)

    @given(
        st.sets(st.integers(min_value=0, max_value=500), min_size=1, max_size=20),
        st.sets(st.integers(min_value=0, max_value=500), min_size=1, max_size=20),
    )
    def test_matches_enumeration(self, a, b):
        assert integer_sumset(a, b) == int_sumset_enum(a, b)


class TestRepHistogram:
    def test_z5_units(self):
        b = SubsetOfZm.from_members(5, [1, 2, 3, 4])
        assert rep_histogram(b).r.tolist() == [4, 3, 3, 3, 3]

    def test_singleton_zero(self):
        b = SubsetOfZm.from_members(6, [0])
        assert rep_histogram(b).r.tolist() == [1, 0, 0, 0, 0, 0]

    @given(st.integers(min_value=2, max_value=100), st.data())
    def test_matches_enumeration(self, m, data):
        members = sorted(data.draw(member_sets(m)))
        b = SubsetOfZm.from_members(m, members)
        hist = rep_histogram(b)
        assert hist.r.tolist() == rep_enum(members, m).tolist()
        assert int(np.sum(hist.r)) == len(members) ** 2


class TestCapitalR:
    def test_units_30_at_two(self):
        b = SubsetOfZm.units(30)
        r = capital_R(b, factorize(30))
        assert int(r[2]) == 3

    def test_empty(self):
        b = SubsetOfZm.from_members(30, [])
        assert not np.any(capital_R(b, factorize(30)))

    @given(st.sampled_from([6, 10, 15, 30, 42]), st.data())
    def test_matches_definition_and_dominates(self, m, data):
        units = units_of(m)
        members = sorted(data.draw(st.sets(st.sampled_from(units), max_size=8)))
        b = SubsetOfZm.from_members(m, members)
        mod = factorize(m)
        r_big = capital_R(b, mod)
        assert r_big.tolist() == relaxed_rep_enum(members, m).tolist()
        assert np.all(r_big >= rep_histogram(b).r)


class TestDivisorStratification:
    def test_m30_layers(self):
        strata = divisor_stratification(factorize(30))
        assert strata[6].tolist() == [6, 12, 18, 24]
        assert strata[30].tolist() == [0]

    def test_partition_identity(self):
        for m in (12, 30, 210):
            strata = divisor_stratification(factorize(m))
            total = sum(len(v) for v in strata.values())
            assert total == m
            mod = factorize(m)
            for d, xs in strata.items():
                assert len(xs) == factorize(m // d).totient


class TestCollisionStats:
    def test_three_tuple(self):
        stats = collision_stats((1, 6, 2), factorize(30))
        assert stats.r_p[5] == 2

    def test_pair_weight(self):
        stats = collision_stats((1, 7), factorize(30))
        assert stats.f == Fraction(1, 2) + Fraction(1, 3)

    def test_distinct_everywhere(self):
        stats = collision_stats((1, 2), factorize(35))
        assert stats.f == 0

    @given(
        st.lists(st.integers(min_value=0, max_value=209), min_size=1, max_size=4)
    )
    def test_weight_matches_brute(self, tup):
        mod = factorize(210)
        stats = collision_stats(tup, mod)
        assert stats.f == collision_weight(tup, mod.prime_divisors)


class TestTailCount:
    def test_units30_diagonal(self):
        b = SubsetOfZm.units(30)
        rep = tail_count(b, 2, Fraction(9, 10), factorize(30))
        assert rep.count == 8

    def test_zero_threshold_counts_everything(self):
        b = SubsetOfZm.units(30)
        rep = tail_count(b, 2, 0, factorize(30))
        assert rep.count == 64

    def test_singleton(self):
        b = SubsetOfZm.from_members(30, [7])
        rep = tail_count(b, 2, Fraction(31, 30), factorize(30))
        assert rep.count == 1
        above = tail_count(b, 2, Fraction(31, 30) + Fraction(1, 1000), factorize(30))
        assert above.count == 0

    def test_monotone_in_beta(self):
        b = SubsetOfZm.units(30)
        mod = factorize(30)
        counts = [
            tail_count(b, 2, Fraction(i, 19), mod).count for i in range(20)
        ]
        assert counts == sorted(counts, reverse=True)


class TestKthMoment:
    def test_z5_units_second_moment(self):
        b = SubsetOfZm.from_members(5, [1, 2, 3, 4])
        cert = kth_moment(b, 2, factorize(5))
        assert cert.s_rb == 52
        assert abs(cert.comparator - 51.2) < 1e-12
        assert abs(cert.comparator_ratio - 1.015625) < 1e-12

    def test_first_moment_identity(self):
        b = SubsetOfZm.from_members(30, [1, 7, 13])
        cert = kth_moment(b, 1, factorize(30))
        assert cert.s_rb == 9

    @given(st.data())
    def test_srb_below_sr_with_exact_strata(self, data):
        units = units_of(210)
        members = sorted(
            data.draw(st.sets(st.sampled_from(units), min_size=1, max_size=10))
        )
        b = SubsetOfZm.from_members(210, members)
        cert = kth_moment(b, 3, factorize(210))
        assert cert.s_rb <= cert.s_r
        assert sum(cert.stratified.values()) == cert.s_r


class TestCkSeries:
    def test_c1_k1_value(self):
        res = ck_series(1.0, 1)
        assert abs(res.partial_sum - 26.05) <= 0.05
        assert res.tail_bound < 1e-9
        assert res.dominant_index == 1

    def test_dominant_near_maximizer(self):
        res = ck_series(1.0, 2)
        assert res.maximizer_index_estimate is not None
        assert abs(res.dominant_index - res.maximizer_index_estimate) <= 1.5

    def test_terms_positive_monotone(self):
        partial = [ck_series(0.5, 2, j_max=j).partial_sum for j in range(1, 6)]
        assert all(b >= a for a, b in zip(partial, partial[1:]))


class TestHolderLowerBound:
    def test_pair_in_z10(self):
        b = SubsetOfZm.from_members(10, [1, 3])
        cert = holder_lower_bound(b, 2)
        assert cert.moment == 6
        assert abs(cert.bound - 16 / 6) < 1e-12
        assert cert.actual == 3

    def test_singleton(self):
        b = SubsetOfZm.from_members(10, [0])
        cert = holder_lower_bound(b, 2)
        assert abs(cert.bound - 1.0) < 1e-12
        assert cert.actual == 1

    def test_z5_units(self):
        b = SubsetOfZm.from_members(5, [1, 2, 3, 4])
        cert = holder_lower_bound(b, 2)
        assert abs(cert.bound - 256 / 52) < 1e-9
        assert cert.actual == 5

    @given(
        st.integers(min_value=2, max_value=60),
        st.integers(min_value=2, max_value=4),
        st.data(),
    )
    def test_sound_on_random_sets(self, m, k, data):
        members = sorted(
            data.draw(st.sets(st.integers(min_value=0, max_value=m - 1), min_size=1))
        )
        b = SubsetOfZm.from_members(m, members)
        cert = holder_lower_bound(b, k)
        assert cert.actual >= cert.bound - 1e-9


class TestChooseMomentOrder:
    def test_synthetic_small_alpha(self):
        raw, clamped = choose_moment_order(math.exp(-100.0))
        assert raw == 2
        assert clamped == 3

    def test_full_density_degenerate(self):
        raw, clamped = choose_moment_order(1.0)
        assert clamped == 3

    def test_units_filtered_pipeline_values(self):
        b = SubsetOfZm.from_members(30, [1, 7, 13, 19])
        alpha = b.cardinality / 8
        _, k = choose_moment_order(alpha)
        cert = kth_moment(b, k, factorize(30))
        brute = len(sumset_enum([1, 7, 13, 19], 30))
        assert cert.actual_sumset == brute
        assert cert.holder_bound is not None
        assert cert.holder_bound <= brute + 1e-9


class TestZnStarCertificate:
    def test_squarefree_path(self):
        b = SubsetOfZm.from_members(30, [1, 7, 13, 19])
        rep = znstar_certificate(b, factorize(30))
        assert rep.squarefree
        assert rep.blocks is None
        assert rep.final_bound <= rep.actual_cyclic + 1e-9

    def test_non_squarefree_blocks(self):
        b = SubsetOfZm.from_members(20, [1, 3, 7, 9])
        rep = znstar_certificate(b, factorize(20))
        assert not rep.squarefree
        assert rep.blocks is not None
        assert rep.block_mass_lhs == rep.block_mass_rhs
        selected = [blk for blk in rep.blocks if blk.selected]
        assert selected and selected[0].alpha_j == Fraction(2, 5)
        assert rep.final_bound <= rep.actual_integer + 1e-9

    @given(st.sampled_from([12, 18, 20, 45, 50]), st.data())
    def test_bound_below_actual(self, m, data):
        units = units_of(m)
        members = sorted(
            data.draw(st.sets(st.sampled_from(units), min_size=1))
        )
        b = SubsetOfZm.from_members(m, members)
        rep = znstar_certificate(b, factorize(m))
        assert rep.final_bound <= rep.actual_cyclic + 1e-9


class TestExtremalConstruct:
    def test_s3_t1(self):
        built = extremal_construct(3, 1)
        assert built.m == 30
        assert built.set.cardinality == 8
        assert built.predicted_sumset == 15
        got = sumset(built.set, built.set)
        assert got.cardinality == 15

    def test_s4_t2(self):
        built = extremal_construct(4, 2)
        assert built.m == 210
        assert built.set.cardinality == 24
        assert built.predicted_sumset == 35
        assert sumset(built.set, built.set).cardinality == 35

    def test_last_coordinate_free(self):
        built = extremal_construct(4, 3)
        assert built.set.cardinality == 7 - 1

    def test_requires_t_below_s(self):
        with pytest.raises(DomainError):
            extremal_construct(3, 3)


class TestMertensRatio:
    def test_w5(self):
        assert abs(mertens_ratio(5) - 30 / (8 * math.log(math.log(8)))) < 1e-12
        assert abs(mertens_ratio(5) - 5.122) < 2e-3

    def test_w11(self):
        assert abs(mertens_ratio(11) - 2310 / (480 * math.log(math.log(480)))) < 1e-12
        assert abs(mertens_ratio(11) - 2.645) < 2e-3

    def test_positive_from_w5(self):
        for w in (5, 7, 11, 13):
            assert mertens_ratio(w) > 0

    def test_tiny_totient_rejected(self):
        # phi = 2 makes loglog negative; the ratio is not meaningful there.
        with pytest.raises(DomainError):
            mertens_ratio(3)


class TestImpliedConstantTrend:
    def test_finite_values(self):
        b = SubsetOfZm.from_members(30, [1, 7, 13, 19])
        rows = implied_constant_trend(b, factorize(30))
        assert len(rows) == 3
        for row in rows:
            assert math.isfinite(row["ratio"])
            assert math.isfinite(row["implied_constant"])
