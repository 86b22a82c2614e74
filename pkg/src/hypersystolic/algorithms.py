"""Systolic and hyper-systolic products on the ring, plus the generic
two-array hyper-systolic reduction.

All products work on tile grids, so the same code multiplies scalar p x p
matrices and p x p grids of dense sub-blocks (see ``mapping``).
"""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import layouts
from .bases import BasisPair, h_range_complete
from .dense import naive_multiply
from .errors import BasisError, ShapeError
from .layouts import DistributedMatrix, LayoutTag
from .ring import RingMachine, ShiftEntry

PAPER = "paper_wholematrix"
RAW = "raw_events"

# phase labels on ShiftLog entries
PRESHIFT, MAIN, BACKSHIFT = "preshift", "main", "backshift"


@dataclass(frozen=True)
class HsParams:
    p: int
    K: int
    K_tilde: int

    def __post_init__(self):
        if self.K < 1 or self.K_tilde < 1 or self.K * self.K_tilde != self.p:
            raise BasisError(f"K={self.K} and K_tilde={self.K_tilde} must be positive with K*K_tilde = p = {self.p}")

    @classmethod
    def for_p(cls, p: int, K: int) -> "HsParams":
        if K < 1 or p % K:
            raise BasisError(f"K={K} does not divide p={p}")
        return cls(p, K, p // K)


@dataclass
class RunReport:
    algo: str
    p: int
    result: Any
    entries: list[ShiftEntry]
    matmul_flops: int = 0
    K: int | None = None
    K_tilde: int | None = None
    preshift_phases: int = 0
    broadcasts: int = 0
    correct: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def shift_count(self) -> int:
        return len(self.entries)

    @property
    def total_cost(self) -> float:
        return sum(e.cost for e in self.entries)

    @property
    def per_array_counts(self) -> dict[str, int]:
        return dict(Counter(e.array for e in self.entries))

    def to_csv_row(self) -> list:
        return [self.algo, self.p,
                "" if self.K is None else self.K,
                "" if self.K_tilde is None else self.K_tilde,
                complexity_counts(self, PAPER), complexity_counts(self, RAW),
                self.total_cost,
                "" if self.correct is None else str(self.correct).lower()]


CSV_HEADER = ["algo", "p", "K", "Ktilde", "shift_count_paper", "shift_count_raw", "total_cost", "correct"]


def reports_to_csv(reports: Sequence[RunReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow(r.to_csv_row())
    return buf.getvalue()


def complexity_counts(report: RunReport, convention: str = PAPER) -> int:
    """Shift count of a run.

    ``raw_events`` is the literal number of logged shifts. ``paper_wholematrix``
    charges each pre-shift of B as one whole-matrix shift, whatever the number
    of row-group events it took (including none when K = 1), and leaves
    Cannon's irregular pre-skew out of the count.
    """
    if convention == RAW:
        return report.shift_count
    if convention != PAPER:
        raise ValueError(f"unknown convention {convention!r}")
    regular = sum(1 for e in report.entries if e.phase not in (PRESHIFT, "preskew"))
    return regular + report.preshift_phases


# -- shared engine ----------------------------------------------------------

def _tile_flops(a_tile, b_tile) -> int:
    r, m = a_tile
    c = b_tile[1]
    return 2 * r * m * c


def _check_square(a, b, p: int):
    ga, ta = layouts.as_grid(a, p)
    gb, tb = layouts.as_grid(b, p)
    if ga.shape[3] != gb.shape[2]:
        raise ShapeError(f"tile shapes {ga.shape[2:]} and {gb.shape[2:]} do not chain")
    return ga, gb, ta is None and tb is None


def _unpack(grid: np.ndarray, scalar: bool):
    return grid[:, :, 0, 0] if scalar else grid


def _result_dtype(ga, gb):
    return np.result_type(ga.dtype, gb.dtype)


def systolic_matmul(machine: RingMachine, a, b) -> RunReport:
    """Systolic product of skewed p x p operands; A moves p-1 times by one cell.

    The final shift of A would only restore its starting position and is
    skipped.
    """
    p = machine.p
    ga, gb, scalar = _check_square(a, b, p)
    mark = machine.log.shift_count
    da = layouts.skew_columns(machine, ga, machine.fresh_name("A"))
    db = layouts.skew_columns(machine, gb, machine.fresh_name("B"))
    tile = (ga.shape[2], gb.shape[3])
    dc = DistributedMatrix(machine.fresh_name("C"), p, p, LayoutTag(layouts.COLUMN_SKEW), tile)
    machine.zeros(dc.handle, (p, *tile), _result_dtype(ga, gb))

    for j in range(p):
        def step(i, a_loc, b_loc, c_loc, j=j):
            c_loc += np.matmul(np.roll(a_loc, j, axis=0), b_loc[j])
        with machine.phase(MAIN):
            machine.map_cells([da.handle, db.handle, dc.handle], step)
            if j < p - 1:
                machine.cshift_row(da.handle, 1)

    result = layouts.unskew_columns(machine, dc)
    for d in (da, db, dc):
        machine.drop(d.handle)
    return RunReport("systolic", p, _unpack(result, scalar), machine.log.since(mark),
                     matmul_flops=p ** 3 * _tile_flops(ga.shape[2:], gb.shape[2:]))


def hs_multiply_into(machine: RingMachine, a_handle: str, b_handle: str,
                     c_handles: Sequence[str], K: int) -> int:
    """Pre-shift B, then run the multiply/shift-A rounds into c_handles.

    ``a_handle`` and ``b_handle`` hold column-skewed operands; B is left
    pre-shifted and A is left shifted by (K_tilde-1)*K. Returns the number
    of tile products per cell.
    """
    p = machine.p
    Kt = p // K
    db = DistributedMatrix(b_handle, p, p, LayoutTag(layouts.COLUMN_SKEW))
    with machine.phase(PRESHIFT):
        layouts.preshift_B(machine, db, K)

    def accumulate(j0):
        for l0 in range(K):
            t = j0 * K + l0
            def step(i, a_loc, b_loc, c_loc, t=t):
                c_loc += np.matmul(np.roll(a_loc, t, axis=0), b_loc[t])
            machine.map_cells([a_handle, b_handle, c_handles[l0]], step)

    with machine.phase(MAIN):
        for j0 in range(Kt - 1):
            accumulate(j0)
            machine.cshift_row(a_handle, K)
        # last round: no trailing shift of A
        accumulate(Kt - 1)
    return p * p


def hs_backshift(machine: RingMachine, c_handles: Sequence[str]) -> str:
    """Fold c^K .. c^2 into c^1 with unit shifts; returns the handle of c^1."""
    K = len(c_handles)
    with machine.phase(BACKSHIFT):
        for j in range(1, K):
            src, dst = c_handles[K - j], c_handles[K - j - 1]
            machine.cshift_row(src, 1)
            def add(i, c_dst, c_src):
                c_dst += c_src
            machine.map_cells([dst, src], add)
    return c_handles[0]


def hyper_systolic_matmul(machine: RingMachine, a, b, params: HsParams | int) -> RunReport:
    p = machine.p
    if isinstance(params, int):
        params = HsParams.for_p(p, params)
    if params.p != p:
        raise BasisError(f"parameters are for p={params.p}, machine has p={p}")
    ga, gb, scalar = _check_square(a, b, p)
    K = params.K
    mark = machine.log.shift_count
    da = layouts.skew_columns(machine, ga, machine.fresh_name("A"))
    db = layouts.skew_columns(machine, gb, machine.fresh_name("B"))
    tile = (ga.shape[2], gb.shape[3])
    dtype = _result_dtype(ga, gb)
    stem = machine.fresh_name("C")
    cs = [f"{stem}^{l}" for l in range(1, K + 1)]
    for h in cs:
        machine.zeros(h, (p, *tile), dtype)

    products = hs_multiply_into(machine, da.handle, db.handle, cs, K)
    c1 = hs_backshift(machine, cs)
    dc = DistributedMatrix(c1, p, p, LayoutTag(layouts.COLUMN_SKEW), tile)
    result = layouts.unskew_columns(machine, dc)
    for h in [da.handle, db.handle, *cs]:
        machine.drop(h)
    return RunReport("hyper", p, _unpack(result, scalar), machine.log.since(mark),
                     matmul_flops=products * p * _tile_flops(ga.shape[2:], gb.shape[2:]),
                     K=K, K_tilde=params.K_tilde, preshift_phases=1)


# -- two-array reduction ----------------------------------------------------

FORWARD = "forward"


def _claimed_pairs(pair: BasisPair) -> list[tuple[int, int]]:
    """Replica index pairs (t, t') used by the reduction, one per offset.

    Offsets reachable more than once are claimed by the first pair in
    row-major order; the others are skipped so nothing is counted twice.
    """
    sa, sb = pair.a.prefix_sums(), pair.b.prefix_sums()
    seen: set[int] = set()
    out = []
    for t, x in enumerate(sa):
        for u, y in enumerate(sb):
            m = (x + y) % pair.n
            if m not in seen:
                seen.add(m)
                out.append((t, u))
    return out


def pairwise_reduce(machine: RingMachine, x: Sequence, z: Sequence,
                    f: Callable[[Any, Any], Any], combine: Callable[[Any, Any], Any],
                    pair: BasisPair) -> list:
    """``F_i = combine_j f(x_i, z_j)`` on an n-cell ring.

    Replica t of x is x shifted so that cell c holds ``x[c - s_t]``; replica
    t' of z holds ``z[c + u_t']`` (s, u the partial sums of A and B). Pairing
    them at cell c realises offset ``j - i = s_t + u_t'`` and the partial
    result belongs to ``F[c - s_t]``; the collector then walks back along A
    reversed, picking up each intermediate array on the way.
    """
    n = machine.p
    if len(x) != n or len(z) != n:
        raise ShapeError(f"x and z must both have length {n}, got {len(x)} and {len(z)}")
    if pair.n != n:
        raise BasisError(f"basis pair covers n={pair.n}, ring has {n} cells")
    complete, table = h_range_complete(pair)
    if not complete:
        raise BasisError(f"basis pair is incomplete for n={n}; unreachable offsets {table.missing()}")

    a, b = pair.a.strides, pair.b.strides
    xs = [machine.fresh_name("x^0")]
    machine.put(xs[0], np.array(list(x), dtype=object))
    zs = [machine.fresh_name("z^0")]
    machine.put(zs[0], np.array(list(z), dtype=object))
    with machine.phase(FORWARD):
        for t in range(1, len(a)):
            xs.append(f"{xs[0]}.{t}")
            machine.cshift_row(xs[t - 1], -a[t], out=xs[t])
        for t in range(1, len(b)):
            zs.append(f"{zs[0]}.{t}")
            machine.cshift_row(zs[t - 1], b[t], out=zs[t])

    ys = [f"{machine.fresh_name('y')}^{t}" for t in range(len(a))]
    for h in ys:
        machine.put(h, np.full(n, None, dtype=object))

    def cell_combine(acc, v):
        return v if acc is None else combine(acc, v)

    for t, u in _claimed_pairs(pair):
        def step(i, xv, zv, yv):
            yv[...] = cell_combine(yv.item(), f(xv.item(), zv.item()))
        machine.map_cells([xs[t], zs[u], ys[t]], step)

    with machine.phase(BACKSHIFT):
        for t in range(len(a) - 1, 0, -1):
            machine.cshift_row(ys[t], a[t])
            def fold(i, dst, src):
                if src.item() is not None:
                    dst[...] = cell_combine(dst.item(), src.item())
            machine.map_cells([ys[t - 1], ys[t]], fold)

    out = list(machine.get(ys[0]))
    for h in xs + zs + ys:
        machine.drop(h)
    return out


def brute_force_reduce(x: Sequence, z: Sequence, f, combine) -> list:
    """O(n^2) double loop; the oracle for ``pairwise_reduce``."""
    out = []
    for xi in x:
        acc = f(xi, z[0])
        for zj in z[1:]:
            acc = combine(acc, f(xi, zj))
        out.append(acc)
    return out


def verify(report: RunReport, a, b, tol: float = 0.0) -> bool:
    from .dense import approx_equal
    report.correct = approx_equal(report.result, naive_multiply(a, b), tol)
    return report.correct
