from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersystolic import (MappingError, RingMachine, block_cyclic_multiply, block_multiply, complexity_counts,
                           cyclic_multiply, naive_multiply)
from hypersystolic.algorithms import PAPER
from hypersystolic.mapping import default_K, flops_per_word

CASES = [(8, 8, 4), (12, 12, 4), (16, 16, 4), (9, 9, 3), (8, 12, 4), (16, 8, 4), (4, 4, 4), (6, 6, 2)]


def operands(n, m, seed=0):
    rng = np.random.default_rng(seed)
    return rng.integers(-9, 10, (n, m)), rng.integers(-9, 10, (m, n))


@pytest.mark.parametrize("n,m,p", CASES)
def test_block_equals_oracle(n, m, p):
    a, b = operands(n, m)
    r = block_multiply(RingMachine(p), a, b)
    assert np.array_equal(r.result, naive_multiply(a, b))
    assert r.algo == "block"


@pytest.mark.parametrize("n,m,p", CASES)
@pytest.mark.parametrize("reduce_memory", [True, False])
def test_cyclic_equals_oracle(n, m, p, reduce_memory):
    a, b = operands(n, m, 1)
    r = cyclic_multiply(RingMachine(p), a, b, memory_reduction=reduce_memory)
    assert np.array_equal(r.result, naive_multiply(a, b))


@pytest.mark.parametrize("n,m,p,l", [(8, 8, 2, 2), (16, 16, 4, 2), (16, 8, 2, 4), (12, 12, 3, 2), (16, 16, 4, 4)])
def test_block_cyclic_equals_oracle(n, m, p, l):
    a, b = operands(n, m, 2)
    r = block_cyclic_multiply(RingMachine(p), a, b, l)
    assert np.array_equal(r.result, naive_multiply(a, b))
    assert r.extra["inner_block"] == l


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(p, K) for p in (1, 2, 3, 4, 6) for K in range(1, p + 1) if p % K == 0]),
       st.integers(1, 3), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_cyclic_property(pk, nb, mb, seed):
    p, K = pk
    a, b = operands(nb * p, mb * p, seed)
    r = cyclic_multiply(RingMachine(p), a, b, K=K)
    assert np.array_equal(r.result, naive_multiply(a, b))


def test_block_cyclic_with_unit_tiles_is_cyclic():
    a, b = operands(16, 8, 3)
    r1 = cyclic_multiply(RingMachine(4), a, b)
    r2 = block_cyclic_multiply(RingMachine(4), a, b, 1)
    assert r1.entries == r2.entries
    assert np.array_equal(r1.result, r2.result)


@pytest.mark.parametrize("p", [2, 4, 6, 9])
def test_block_shift_count_independent_of_n(p):
    K = default_K(p)
    counts = set()
    for scale in (1, 2, 3):
        a, b = operands(p * scale, p * scale)
        counts.add(complexity_counts(block_multiply(RingMachine(p), a, b), PAPER))
    assert counts == {K + p // K - 1}


def test_peak_live_intermediates():
    a, b = operands(16, 16)
    on = cyclic_multiply(RingMachine(4), a, b, K=2)
    off = cyclic_multiply(RingMachine(4), a, b, K=2, memory_reduction=False)
    assert on.extra["peak_live_intermediates"] == 2
    assert off.extra["peak_live_intermediates"] == 2 * 4


def test_default_K():
    assert [default_K(p) for p in (1, 2, 3, 4, 6, 8, 9, 12, 16)] == [1, 1, 1, 2, 2, 2, 3, 3, 4]


def test_flops_per_word():
    assert flops_per_word(4) == 2
    assert flops_per_word(3) == Fraction(3, 2)


def test_errors():
    with pytest.raises(MappingError):
        block_multiply(RingMachine(4), np.zeros((6, 6)), np.zeros((6, 6)))
    with pytest.raises(MappingError):
        cyclic_multiply(RingMachine(4), np.zeros((8, 4)), np.zeros((8, 4)))
    with pytest.raises(MappingError):
        block_cyclic_multiply(RingMachine(2), np.zeros((8, 8)), np.zeros((8, 8)), 3)
