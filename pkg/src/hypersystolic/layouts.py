"""Column-skewed distributed matrices on the ring.

Cell ``i`` owns column ``i`` of a p x p matrix, rotated so that local slot
``l`` holds row ``((l + i - 2) mod p) + 1`` (1-based); the diagonal element
sits in slot 1 of every cell. Entries may be scalars or dense tiles, which
is how the block mappings reuse the same algorithms.

Pre-shift of B (hyper-systolic start). Local slot row ``j`` is shifted along
the ring by ``MOD(1 - j, K)`` with the truncating (Fortran) remainder, i.e.
by ``-((j - 1) mod K)``: slot rows move *toward higher* cell indices by
``(j - 1) mod K`` positions. For p = 4, K = 2 rows 2 and 4 move by one
position and rows 1 and 3 stay. The floor-remainder reading ``(1-j) mod K``
yields a wrong product for every K > 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisError, LayoutError, ShapeError
from .ring import RingMachine

PLAIN = "plain_columns"
COLUMN_SKEW = "column_skew"
PRESHIFTED = "preshifted"


@dataclass(frozen=True)
class LayoutTag:
    kind: str
    K: int | None = None

    def __post_init__(self):
        if self.kind not in (PLAIN, COLUMN_SKEW, PRESHIFTED):
            raise ValueError(f"unknown layout {self.kind!r}")
        if (self.kind == PRESHIFTED) != (self.K is not None):
            raise ValueError("only the preshifted layout carries K")


@dataclass(frozen=True)
class DistributedMatrix:
    handle: str
    logical_rows: int
    logical_cols: int
    layout: LayoutTag
    tile: tuple[int, int] | None = None  # None means scalar entries


def as_grid(m, p: int) -> tuple[np.ndarray, tuple[int, int] | None]:
    """Normalise a p x p matrix or a (p, p, r, c) tile grid to tile-grid form."""
    arr = np.asarray(m)
    if arr.ndim == 2:
        if arr.shape != (p, p):
            raise ShapeError(f"expected a {p}x{p} matrix for a ring of {p} cells, got {arr.shape}")
        return arr[:, :, None, None], None
    if arr.ndim == 4 and arr.shape[:2] == (p, p):
        return arr, (arr.shape[2], arr.shape[3])
    raise ShapeError(f"expected a {p}x{p} matrix or tile grid, got shape {arr.shape}")


def skew_grid(grid: np.ndarray) -> np.ndarray:
    p = grid.shape[0]
    cells = np.arange(p)[:, None]
    slots = np.arange(p)[None, :]
    return grid[(slots + cells) % p, cells]


def unskew_grid(local: np.ndarray) -> np.ndarray:
    p = local.shape[0]
    out = np.empty_like(local)
    cells = np.arange(p)[:, None]
    slots = np.arange(p)[None, :]
    out[(slots + cells) % p, cells] = local
    return out


def skew_columns(machine: RingMachine, m, name: str | None = None) -> DistributedMatrix:
    grid, tile = as_grid(m, machine.p)
    name = name or machine.fresh_name("M")
    machine.put(name, skew_grid(grid))
    return DistributedMatrix(name, machine.p, machine.p, LayoutTag(COLUMN_SKEW), tile)


def unskew_columns(machine: RingMachine, d: DistributedMatrix) -> np.ndarray:
    if d.layout.kind != COLUMN_SKEW:
        raise LayoutError(f"unskew_columns needs a column_skew layout, got {d.layout.kind}")
    grid = unskew_grid(machine.get(d.handle))
    return grid[:, :, 0, 0] if d.tile is None else grid


def preshift_strides(p: int, K: int) -> dict[int, list[int]]:
    """Nonzero pre-shift stride -> 0-based slot rows moved by it."""
    groups: dict[int, list[int]] = {}
    for t in range(p):
        stride = -(t % K)
        if stride:
            groups.setdefault(stride, []).append(t)
    return groups


def _check_K(p: int, K: int) -> None:
    if K < 1 or p % K:
        raise BasisError(f"K={K} does not divide p={p}")


def preshift_B(machine: RingMachine, d: DistributedMatrix, K: int) -> DistributedMatrix:
    if d.layout.kind != COLUMN_SKEW:
        raise LayoutError(f"pre-shift needs a column_skew layout, got {d.layout.kind}")
    _check_K(machine.p, K)
    for stride, rows in sorted(preshift_strides(machine.p, K).items(), reverse=True):
        machine.cshift_row(d.handle, stride, rows=rows)
    return DistributedMatrix(d.handle, d.logical_rows, d.logical_cols, LayoutTag(PRESHIFTED, K), d.tile)


def unpreshift_B(machine: RingMachine, d: DistributedMatrix) -> DistributedMatrix:
    if d.layout.kind != PRESHIFTED:
        raise LayoutError(f"expected a preshifted layout, got {d.layout.kind}")
    for stride, rows in sorted(preshift_strides(machine.p, d.layout.K).items(), reverse=True):
        machine.cshift_row(d.handle, -stride, rows=rows)
    return DistributedMatrix(d.handle, d.logical_rows, d.logical_cols, LayoutTag(COLUMN_SKEW), d.tile)
