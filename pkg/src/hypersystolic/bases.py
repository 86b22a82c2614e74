"""Stride bases: regular constructions, completeness, gain factors, search.

A basis is an ordered stride sequence starting with 0. Replica ``t`` of an
array is the array shifted by the partial sum ``a_0 + ... + a_t``, so a pair
(A, B) can pair elements at offset ``m`` iff ``m`` is a sum of one partial
sum of A and one of B (mod n). That prefix reading is the default
``mode="prefix"``; ``mode="runs"`` also admits interior runs
``a_i + ... + a_{i+j}`` and exists for comparison only (no ring data flow
realises those offsets, and it admits pairs shorter than the sqrt(n) bound,
e.g. A=(0,1,3,2), B=(0,7,7) at n=16).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import BasisError, DomainError, SearchExhaustedError
from .ring import CostModel

MAX_SEARCH_N = 64


@dataclass(frozen=True)
class StrideBasis:
    strides: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "strides", tuple(int(s) for s in self.strides))
        if not self.strides or self.strides[0] != 0:
            raise BasisError(f"a stride basis starts with 0, got {self.strides}")

    def __len__(self):
        return len(self.strides)

    def __iter__(self):
        return iter(self.strides)

    @property
    def k(self) -> int:
        """Number of actual shifts (length minus the leading zero)."""
        return len(self.strides) - 1

    def prefix_sums(self) -> list[int]:
        out, acc = [], 0
        for s in self.strides:
            acc += s
            out.append(acc)
        return out

    def run_sums(self) -> list[int]:
        s = self.strides
        return [sum(s[i:i + j + 1]) for i in range(len(s)) for j in range(len(s) - i)]

    def __str__(self):
        return ",".join(str(s) for s in self.strides)


def _basis(x) -> StrideBasis:
    return x if isinstance(x, StrideBasis) else StrideBasis(tuple(x))


@dataclass(frozen=True)
class BasisPair:
    a: StrideBasis
    b: StrideBasis
    n: int

    def __post_init__(self):
        object.__setattr__(self, "a", _basis(self.a))
        object.__setattr__(self, "b", _basis(self.b))
        if self.n < 1:
            raise BasisError(f"target range must be positive, got {self.n}")

    @property
    def length(self) -> int:
        return self.a.k + self.b.k

    def cost(self, cost_model: CostModel) -> float:
        return sum(cost_model(s, self.n) for s in self.a.strides[1:]) + \
            sum(cost_model(s, self.n) for s in self.b.strides[1:])


@dataclass(frozen=True)
class MultiplicityTable:
    n: int
    counts: dict[int, int]

    @property
    def complete(self) -> bool:
        return all(self.counts[m] >= 1 for m in range(self.n))

    def missing(self) -> list[int]:
        return [m for m in range(self.n) if self.counts[m] == 0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "count"])
        for m in range(self.n):
            w.writerow([m, self.counts[m]])
        return buf.getvalue()


def regular_bases(K: int, K_tilde: int) -> tuple[StrideBasis, StrideBasis, StrideBasis]:
    """Bases of the hyper-systolic matrix product on p = K*K_tilde cells.

    A: K_tilde-1 shifts of A by K; B: K-1 pre-shift steps of -1;
    C: K-1 unit back-shifts of the intermediate results.
    """
    if K < 1 or K_tilde < 1:
        raise BasisError(f"K and K_tilde must be positive, got {K}, {K_tilde}")
    return (StrideBasis((0,) + (K,) * (K_tilde - 1)),
            StrideBasis((0,) + (-1,) * (K - 1)),
            StrideBasis((0,) + (1,) * (K - 1)))


def regular_two_array_bases(K: int, K_tilde: int) -> BasisPair:
    """A = (0, 1 x (K-1)), B = (0, K x (K_tilde-1)) covering n = K*K_tilde."""
    if K < 1 or K_tilde < 1:
        raise BasisError(f"K and K_tilde must be positive, got {K}, {K_tilde}")
    return BasisPair(StrideBasis((0,) + (1,) * (K - 1)),
                     StrideBasis((0,) + (K,) * (K_tilde - 1)), K * K_tilde)


def h_range_complete(pair: BasisPair, mode: str = "prefix") -> tuple[bool, MultiplicityTable]:
    """Check that every m in 0..n-1 is a sum of partial sums of A and B (mod n).

    The multiplicity of m counts index pairs (prefix mode) or index
    quadruples (runs mode) that represent it.
    """
    if mode == "prefix":
        sa, sb = pair.a.prefix_sums(), pair.b.prefix_sums()
    elif mode == "runs":
        sa, sb = pair.a.run_sums(), pair.b.run_sums()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    n = pair.n
    counts = dict.fromkeys(range(n), 0)
    for x in sa:
        for y in sb:
            counts[(x + y) % n] += 1
    table = MultiplicityTable(n, counts)
    return table.complete, table


class Gain(NamedTuple):
    R: Fraction
    T: int


def gain_factor_two_arrays(n: int, K: int, K_tilde: int) -> Gain:
    """R = (n-1)/(2K + K_tilde - 3): forward shifts of both arrays plus back-shifts."""
    if K * K_tilde != n:
        raise DomainError(f"K*K_tilde = {K * K_tilde} != n = {n}")
    T = 2 * K + K_tilde - 3
    if T <= 0:
        raise DomainError(f"no shifts at K={K}, K_tilde={K_tilde}; gain factor undefined")
    return Gain(Fraction(n - 1, T), T)


def gain_factor_matmul(p: int, K: int, K_tilde: int) -> Gain:
    """R = (p-1)/(K + K_tilde - 1) against the systolic product's p-1 shifts."""
    if K * K_tilde != p:
        raise DomainError(f"K*K_tilde = {K * K_tilde} != p = {p}")
    T = K + K_tilde - 1
    return Gain(Fraction(p - 1, T), T)


def cannon_shift_count(p: int) -> int:
    """Systolic-phase shift steps of Cannon's algorithm on a sqrt(p) x sqrt(p) torus."""
    s = math.isqrt(p)
    if s * s != p:
        raise DomainError(f"Cannon needs a square processor count, got {p}")
    return 2 * s - 2


def divisor_pairs(n: int) -> list[tuple[int, int]]:
    return [(K, n // K) for K in range(1, n + 1) if n % K == 0]


# -- exact search -----------------------------------------------------------

def _rot(mask: int, u: int, n: int, full: int) -> int:
    u %= n
    return ((mask << u) | (mask >> (n - u))) & full if u else mask


def _extra_points(a: int, b: int, n: int) -> int:
    """Fewest added partial sums so that (a + x) * (b + y) >= n with x + y minimal."""
    e = 0
    while True:
        if any((a + x) * (b + e - x) >= n for x in range(e + 1)):
            return e
        e += 1


def optimal_basis_search(n: int, cost: CostModel | None = None,
                         max_len: int | None = None) -> BasisPair:
    """Exact branch-and-bound search for a complete pair of minimal cost.

    Minimises k + k' under the constant model and the summed stride cost
    otherwise. Strides range over residues 1..n-1 (a stride and its
    negative are the same ring shift, and every cost model here is a
    function of the residue). Ties go to the lexicographically smallest
    (A strides, B strides). Exponential in general; n is capped at 64 and
    non-constant costs are only practical up to roughly n = 12.
    """
    cost = cost or CostModel.constant()
    if n < 1:
        raise BasisError(f"n must be positive, got {n}")
    if n > MAX_SEARCH_N:
        raise BasisError(f"n={n} exceeds the exhaustive-search cap of {MAX_SEARCH_N}")
    if n == 1:
        return BasisPair((0,), (0,), 1)
    max_len = n - 1 if max_len is None else max_len
    c = [0] + [cost(s, n) for s in range(1, n)]
    cmin = min(c[1:])
    full = (1 << n) - 1

    best_cost = math.inf
    best_key: tuple = ()
    for K, Kt in divisor_pairs(n):
        pair = regular_two_array_bases(K, Kt)
        if pair.length <= max_len:
            key = (pair.a.strides, pair.b.strides)
            pc = pair.cost(cost)
            if (pc, key) < (best_cost, best_key) or best_cost == math.inf:
                best_cost, best_key = pc, key

    def worse(lb, key_floor) -> bool:
        # key_floor is the smallest key reachable in the subtree
        return lb > best_cost or (lb == best_cost and key_floor > best_key)

    def search_b(A, maskA, nA, B, last, covered, cost_sofar):
        nonlocal best_cost, best_key
        if covered == full:
            if (cost_sofar, (A, B)) < (best_cost, best_key):
                best_cost, best_key = cost_sofar, (A, B)
            return
        need = -(-(n - bin(covered).count("1")) // nA)
        if len(A) - 1 + len(B) - 1 + need > max_len:
            return
        if worse(cost_sofar + need * cmin, (A, B)):
            return
        for s in range(1, n):
            u = (last + s) % n
            search_b(A, maskA, nA, B + (s,), u, covered | _rot(maskA, u, n, full), cost_sofar + c[s])

    def search_a(A, last, maskA, cost_a):
        nA = bin(maskA).count("1")
        e = _extra_points(nA, 1, n)
        if len(A) - 1 + e > max_len:
            return
        if worse(cost_a + e * cmin, (A,)):
            return
        search_b(A, maskA, nA, (0,), 0, maskA, cost_a)
        if len(A) - 1 < max_len:
            for s in range(1, n):
                u = (last + s) % n
                search_a(A + (s,), u, maskA | (1 << u), cost_a + c[s])

    search_a((0,), 0, 1, 0)
    if best_cost == math.inf:
        raise SearchExhaustedError(f"no complete pair for n={n} within max_len={max_len}")
    return BasisPair(best_key[0], best_key[1], n)
