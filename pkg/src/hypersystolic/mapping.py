"""Multiplying n x m by m x n matrices on p cells.

block        p x p grid of (n/p x m/p) sub-blocks, one hyper-systolic product
             whose entries are sub-matrices.
cyclic       (n/p) x (m/p) blocks of size p x p, each skewed separately.
block_cyclic cyclic over p x p grids whose entries are l x l tiles kept in
             normal (unskewed) order.

The cyclic schemes process one block row of C at a time. A block
A_{I,k} is skewed once and meets the whole block row k of B, whose p x p
blocks are carried side by side inside every entry, so only the K
intermediate arrays of the current block row are alive. With
``memory_reduction=False`` the intermediates of every block row are
allocated up front instead.

A tile of side l moves 2 l^2 words per 2 l^3 flops in the local kernel,
i.e. l/2 flops per word for real data (``flops_per_word``).
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import layouts
from .algorithms import HsParams, RunReport, hs_backshift, hs_multiply_into, hyper_systolic_matmul
from .dense import as_matrix
from .errors import MappingError
from .layouts import DistributedMatrix, LayoutTag
from .ring import RingMachine


def default_K(p: int) -> int:
    """Divisor of p closest to sqrt(p), ties toward the smaller one."""
    root = math.sqrt(p)
    return min((d for d in range(1, p + 1) if p % d == 0), key=lambda d: (abs(d - root), d))


def flops_per_word(l: int) -> Fraction:
    return Fraction(l, 2)


def _operands(a, b, p: int, l: int = 1):
    a, b = as_matrix(a), as_matrix(b)
    n, m = a.shape
    if b.shape != (m, n):
        raise MappingError(f"expected an {m}x{n} right operand for a {n}x{m} left operand, got {b.shape}")
    if n % p or m % p:
        raise MappingError(f"p={p} must divide n={n} and m={m}")
    if l < 1 or (n // p) % l or (m // p) % l:
        raise MappingError(f"inner block {l} must divide n/p={n // p} and m/p={m // p}")
    return a, b


def _tiles(x: np.ndarray, tr: int, tc: int) -> np.ndarray:
    """Split into a grid of tr x tc tiles: result[I, J] is a tile."""
    r, c = x.shape
    return x.reshape(r // tr, tr, c // tc, tc).transpose(0, 2, 1, 3)


def _untile(g: np.ndarray) -> np.ndarray:
    gr, gc, tr, tc = g.shape
    return g.transpose(0, 2, 1, 3).reshape(gr * tr, gc * tc)


def block_multiply(machine: RingMachine, a, b, K: int | None = None) -> RunReport:
    p = machine.p
    a, b = _operands(a, b, p)
    n, m = a.shape
    K = default_K(p) if K is None else K
    report = hyper_systolic_matmul(machine, _tiles(a, n // p, m // p), _tiles(b, m // p, n // p),
                                   HsParams.for_p(p, K))
    report.algo = "block"
    report.result = _untile(report.result)
    return report


def _block_cyclic(machine: RingMachine, a, b, l: int, K: int | None, memory_reduction: bool,
                  algo: str) -> RunReport:
    p = machine.p
    a, b = _operands(a, b, p, l)
    n, m = a.shape
    K = default_K(p) if K is None else K
    params = HsParams.for_p(p, K)
    nb, mb = n // (l * p), m // (l * p)
    at = _tiles(a, l, l)
    # B tiles regrouped so entry (r, c) of block row k holds tiles
    # (k*p + r, J*p + c) for every J side by side: shape (mb, p, p, l, nb*l)
    bt = _tiles(b, l, l).reshape(mb, p, nb, p, l, l).transpose(0, 1, 3, 4, 2, 5).reshape(mb, p, p, l, nb * l)
    dtype = np.result_type(a, b)
    mark = machine.log.shift_count
    live = peak = products = 0
    out = np.zeros((n, n), dtype=dtype)

    def alloc(row):
        nonlocal live, peak
        handles = [f"C{row}^{x}" for x in range(1, K + 1)]
        for h in handles:
            machine.zeros(h, (p, l, nb * l), dtype)
        live += K
        peak = max(peak, live)
        return handles

    pending = {} if memory_reduction else {row: alloc(row) for row in range(nb)}
    for row in range(nb):
        cs = alloc(row) if memory_reduction else pending[row]
        for k in range(mb):
            da = layouts.skew_columns(machine, at[row * p:(row + 1) * p, k * p:(k + 1) * p], "A")
            db = layouts.skew_columns(machine, bt[k], "B")
            products += hs_multiply_into(machine, da.handle, db.handle, cs, K)
            machine.drop(da.handle)
            machine.drop(db.handle)
        c1 = hs_backshift(machine, cs)
        grid = layouts.unskew_columns(machine, DistributedMatrix(c1, p, p, LayoutTag(layouts.COLUMN_SKEW), (l, nb * l)))
        # grid[r, c, i, J, j] -> rows r*l+i, columns J*p*l + c*l + j
        block_row = grid.reshape(p, p, l, nb, l).transpose(0, 2, 3, 1, 4).reshape(p * l, nb * p * l)
        out[row * p * l:(row + 1) * p * l] = block_row
        for h in cs:
            machine.drop(h)
        live -= K

    return RunReport(algo, p, out, machine.log.since(mark),
                     matmul_flops=products * p * 2 * l * l * l * nb,
                     K=K, K_tilde=params.K_tilde, preshift_phases=nb * mb,
                     extra={"peak_live_intermediates": peak, "inner_block": l})


def cyclic_multiply(machine: RingMachine, a, b, K: int | None = None,
                    memory_reduction: bool = True) -> RunReport:
    return _block_cyclic(machine, a, b, 1, K, memory_reduction, "cyclic")


def block_cyclic_multiply(machine: RingMachine, a, b, inner_block: int, K: int | None = None,
                          memory_reduction: bool = True) -> RunReport:
    return _block_cyclic(machine, a, b, inner_block, K, memory_reduction, "block_cyclic")
