import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypersystolic import (BasisError, BasisPair, CostModel, DomainError, SearchExhaustedError, StrideBasis,
                           cannon_shift_count, gain_factor_matmul, gain_factor_two_arrays, h_range_complete,
                           optimal_basis_search, regular_bases, regular_two_array_bases)
from hypersystolic.bases import MAX_SEARCH_N, divisor_pairs


def reachable(a, b, n):
    """Offsets s_t + u_t' (mod n) over all prefix sums, computed directly."""
    sa = list(itertools.accumulate(a))
    sb = list(itertools.accumulate(b))
    return {(x + y) % n for x in sa for y in sb}


def brute_force_optimum(n, cost, max_len):
    best = None
    for la in range(max_len + 1):
        for lb in range(max_len + 1 - la):
            for sa in itertools.product(range(1, n), repeat=la):
                for sb in itertools.product(range(1, n), repeat=lb):
                    a, b = (0,) + sa, (0,) + sb
                    if len(reachable(a, b, n)) == n:
                        key = (sum(cost(s, n) for s in sa + sb), (a, b))
                        if best is None or key < best:
                            best = key
    return best


def test_basis_must_start_with_zero():
    with pytest.raises(BasisError):
        StrideBasis((1, 2))
    assert str(StrideBasis((0, 1, 1))) == "0,1,1"
    assert StrideBasis((0, 1, 1)).k == 2


def test_regular_bases_example():
    a, b, c = regular_bases(2, 2)
    assert (a.strides, b.strides, c.strides) == ((0, 2), (0, -1), (0, 1))


def test_regular_two_array_example_and_table():
    pair = regular_two_array_bases(2, 2)
    ok, table = h_range_complete(pair)
    assert ok
    assert table.to_csv().splitlines() == ["m,count", "0,1", "1,1", "2,1", "3,1"]


def test_incomplete_pair_reports_missing():
    ok, table = h_range_complete(BasisPair((0, 1), (0, 1), 4))
    assert not ok
    assert table.missing() == [3]


@given(st.integers(1, 64).flatmap(lambda n: st.sampled_from(divisor_pairs(n))))
def test_regular_pairs_complete_with_unit_multiplicity(kk):
    K, Kt = kk
    ok, table = h_range_complete(regular_two_array_bases(K, Kt))
    assert ok
    assert set(table.counts.values()) == {1}


@given(n=st.integers(1, 12),
       a=st.lists(st.integers(-20, 20), max_size=5),
       b=st.lists(st.integers(-20, 20), max_size=5))
def test_completeness_matches_direct_enumeration(n, a, b):
    a, b = (0, *a), (0, *b)
    ok, table = h_range_complete(BasisPair(a, b, n))
    assert ok == (len(reachable(a, b, n)) == n)
    assert sum(table.counts.values()) == len(a) * len(b)


def test_run_reading_counterexample():
    # Contiguous runs anywhere in the sequence cover Z_16 with only 5 strides,
    # below the 2(sqrt(n)-1) = 6 lower bound; prefix sums do not.
    pair = BasisPair((0, 1, 3, 2), (0, 7, 7), 16)
    assert h_range_complete(pair, mode="runs")[0]
    assert not h_range_complete(pair, mode="prefix")[0]
    assert pair.length == 5


@pytest.mark.parametrize("n,expected", [(4, 2), (9, 4), (16, 6), (25, 8)])
def test_search_reaches_square_lower_bound(n, expected):
    pair = optimal_basis_search(n)
    assert pair.length == expected == 2 * (math.isqrt(n) - 1)
    assert h_range_complete(pair)[0]


@pytest.mark.parametrize("n", range(1, 36))
def test_search_never_beats_the_bound(n):
    pair = optimal_basis_search(n)
    assert h_range_complete(pair)[0]
    # (k+1)(k'+1) >= n with k + k' minimal gives ceil(2 sqrt(n)) - 2
    assert pair.length >= math.ceil(2 * math.sqrt(n)) - 2


@pytest.mark.parametrize("n", range(2, 7))
def test_search_matches_brute_force_constant(n):
    pair = optimal_basis_search(n)
    cost, key = brute_force_optimum(n, lambda s, n: 1, n - 1)
    assert pair.length == cost
    assert (pair.a.strides, pair.b.strides) == key


@pytest.mark.parametrize("n", range(2, 7))
def test_search_matches_brute_force_per_hop(n):
    cm = CostModel.per_hop()
    pair = optimal_basis_search(n, cm)
    cost, key = brute_force_optimum(n, cm, n - 1)
    assert pair.cost(cm) == cost
    assert (pair.a.strides, pair.b.strides) == key


@pytest.mark.parametrize("n", [7, 8])
def test_search_matches_brute_force_with_length_cap(n):
    pair = optimal_basis_search(n, max_len=4)
    cost, key = brute_force_optimum(n, lambda s, n: 1, 4)
    assert (pair.length, (pair.a.strides, pair.b.strides)) == (cost, key)


def test_search_frozen_examples():
    assert optimal_basis_search(4).a.strides == (0, 1)
    assert optimal_basis_search(4).b.strides == (0, 2)
    hop = optimal_basis_search(4, CostModel.per_hop())
    assert (hop.a.strides, hop.b.strides) == ((0,), (0, 1, 1, 1))


def test_search_trivial_and_cap():
    assert optimal_basis_search(1).length == 0
    with pytest.raises(BasisError):
        optimal_basis_search(MAX_SEARCH_N + 1)


def test_search_exhausted_when_length_cap_too_small():
    with pytest.raises(SearchExhaustedError):
        optimal_basis_search(16, max_len=5)


def test_matmul_gain_examples():
    g = gain_factor_matmul(16, 4, 4)
    assert g == (Fraction(15, 7), 7)
    assert gain_factor_matmul(1, 1, 1) == (Fraction(0), 1)
    with pytest.raises(DomainError):
        gain_factor_matmul(16, 3, 5)


@given(st.integers(2, 200).flatmap(lambda n: st.sampled_from(divisor_pairs(n))))
def test_two_array_gain_formula(kk):
    K, Kt = kk
    n = K * Kt
    T = 2 * K + Kt - 3
    if T <= 0:
        with pytest.raises(DomainError):
            gain_factor_two_arrays(n, K, Kt)
    else:
        assert gain_factor_two_arrays(n, K, Kt) == (Fraction(n - 1, T), T)


def test_cannon_counts():
    assert [cannon_shift_count(p) for p in (1, 4, 9, 16)] == [0, 2, 4, 6]
    with pytest.raises(DomainError):
        cannon_shift_count(8)


@pytest.mark.parametrize("s", range(2, 9))
def test_square_configurations(s):
    n = s * s
    # two arrays with back-shifts: 3(sqrt(n) - 1) shifts in total
    assert gain_factor_two_arrays(n, s, s).T == 3 * (s - 1)
    # matrix product: one more shift than Cannon's systolic phase
    assert gain_factor_matmul(n, s, s).T == cannon_shift_count(n) + 1
