"""Abstract 1D processor ring with superstep-synchronous circular shifts.

Every distributed array lives in one numpy array whose leading axis is the
cell index (0-based internally, cells are numbered 1..p in the public API).
The second axis, when present, is the cell-local slot index; any further
axes are the shape of a single entry (1x1 for scalars, l x l for tiles).

Shift direction follows the ring formula ``a'_i = a_{(i+k-1+p) mod p + 1}``:
a positive stride moves data toward lower cell indices (cell i receives
the value previously held by cell i+k).
"""
from __future__ import annotations

import contextlib
import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .errors import RegistryError


@dataclass(frozen=True)
class CostModel:
    """Cost of one circular shift as a function of its stride.

    ``constant``: every nonzero stride costs 1.
    ``per_hop``: shortest ring distance ``min(|s| mod p, p - |s| mod p)``.
    ``table``: explicit costs keyed by the stride residue mod p.
    """

    kind: str = "constant"
    table: Mapping[int, float] | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "per_hop", "table"):
            raise ValueError(f"unknown cost model kind {self.kind!r}")
        if self.kind == "table":
            if not self.table:
                raise ValueError("table cost model needs a non-empty table")
            if any(c <= 0 for s, c in self.table.items() if s != 0):
                raise ValueError("table costs for nonzero strides must be positive")

    @classmethod
    def constant(cls) -> "CostModel":
        return cls("constant")

    @classmethod
    def per_hop(cls) -> "CostModel":
        return cls("per_hop")

    @classmethod
    def from_table(cls, table: Mapping[int, float]) -> "CostModel":
        return cls("table", dict(table))

    def __call__(self, stride: int, p: int) -> float:
        r = stride % p
        if r == 0:
            return 0
        if self.kind == "constant":
            return 1
        if self.kind == "per_hop":
            return min(r, p - r)
        try:
            return self.table[r]
        except KeyError:
            if (r - p) in self.table:
                return self.table[r - p]
            raise KeyError(f"no cost for stride {stride} (residue {r}) on a ring of {p}") from None


@dataclass(frozen=True)
class ShiftEntry:
    array: str
    stride: int
    elements: int
    cost: float
    phase: str = ""


@dataclass
class ShiftLog:
    entries: list[ShiftEntry] = field(default_factory=list)

    def append(self, entry: ShiftEntry) -> None:
        self.entries.append(entry)

    @property
    def shift_count(self) -> int:
        return len(self.entries)

    @property
    def total_cost(self) -> float:
        return sum(e.cost for e in self.entries)

    @property
    def total_elements(self) -> int:
        return sum(e.elements for e in self.entries)

    def since(self, mark: int) -> list[ShiftEntry]:
        return self.entries[mark:]

    def to_csv(self, entries: Sequence[ShiftEntry] | None = None) -> str:
        entries = self.entries if entries is None else entries
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "array", "stride", "elements", "cost"])
        for step, e in enumerate(entries, start=1):
            w.writerow([step, e.array, e.stride, e.elements, e.cost])
        w.writerow(["TOTAL", "", "", sum(e.elements for e in entries), sum(e.cost for e in entries)])
        return buf.getvalue()


class CellStore(Mapping[str, np.ndarray]):
    """Read/write view of one cell's local arrays."""

    def __init__(self, machine: "RingMachine", index: int):
        self._machine = machine
        self.index = index

    def __getitem__(self, name: str) -> np.ndarray:
        return self._machine.get(name)[self.index - 1, ...]

    def __iter__(self) -> Iterator[str]:
        return iter(self._machine.names)

    def __len__(self) -> int:
        return len(self._machine.names)


class RingMachine:
    def __init__(self, p: int, cost_model: CostModel | None = None):
        if p < 1:
            raise ValueError(f"ring needs at least one cell, got p={p}")
        self.p = p
        self.cost_model = cost_model or CostModel.constant()
        self.log = ShiftLog()
        self._arrays: dict[str, np.ndarray] = {}
        self._phase = ""

    def __repr__(self):
        return f"RingMachine(p={self.p}, arrays={list(self._arrays)}, shifts={self.log.shift_count})"

    # -- registry ---------------------------------------------------------
    @property
    def names(self) -> list[str]:
        return list(self._arrays)

    def __contains__(self, name: str) -> bool:
        return name in self._arrays

    def put(self, name: str, data) -> np.ndarray:
        """Register (or overwrite) an array; ``data`` has shape ``(p, ...)``."""
        arr = np.array(data, copy=True)
        if arr.ndim < 1 or arr.shape[0] != self.p:
            raise ValueError(f"array {name!r} must have leading axis {self.p}, got {arr.shape}")
        self._arrays[name] = arr
        return arr

    def zeros(self, name: str, local_shape: tuple[int, ...] = (), dtype=np.int64) -> np.ndarray:
        return self.put(name, np.zeros((self.p, *local_shape), dtype=dtype))

    def get(self, name: str) -> np.ndarray:
        try:
            return self._arrays[name]
        except KeyError:
            raise RegistryError(f"no array named {name!r} on this machine") from None

    def drop(self, name: str) -> None:
        self.get(name)
        del self._arrays[name]

    def fresh_name(self, stem: str) -> str:
        if stem not in self._arrays:
            return stem
        n = 2
        while f"{stem}{n}" in self._arrays:
            n += 1
        return f"{stem}{n}"

    def cell(self, i: int) -> CellStore:
        if not 1 <= i <= self.p:
            raise IndexError(f"cell {i} outside 1..{self.p}")
        return CellStore(self, i)

    # -- communication ----------------------------------------------------
    @contextlib.contextmanager
    def phase(self, label: str):
        prev, self._phase = self._phase, label
        try:
            yield self
        finally:
            self._phase = prev

    def cshift_row(self, name: str, stride: int, rows: Sequence[int] | None = None,
                   out: str | None = None) -> None:
        """Circular shift along the ring: cell i receives from cell i+stride.

        ``rows`` restricts the shift to a subset of local slots (0-based).
        ``out`` writes the shifted copy to a new array and leaves ``name``
        untouched; either way the event is logged once.
        """
        arr = self.get(name)
        entry_size = int(np.prod(arr.shape[2:], dtype=np.int64)) if arr.ndim > 2 else 1
        if rows is None:
            shifted = np.roll(arr, -stride, axis=0)
            elements = arr.size // self.p
        else:
            rows = list(rows)
            shifted = arr.copy()
            shifted[:, rows] = np.roll(arr[:, rows], -stride, axis=0)
            elements = len(rows) * entry_size
        if out is None:
            self._arrays[name] = shifted
        else:
            self._arrays[out] = shifted
        self.log.append(ShiftEntry(name, stride, elements, self.cost_model(stride, self.p), self._phase))

    def cshift_col(self, name: str, stride: int) -> None:
        """Rotate the local slots inside every cell; no communication, not logged."""
        arr = self.get(name)
        if arr.ndim < 2:
            raise ValueError(f"array {name!r} has no local slot axis")
        self._arrays[name] = np.roll(arr, -stride, axis=1)

    # -- computation ------------------------------------------------------
    def map_cells(self, names: Sequence[str], fn: Callable[..., None]) -> None:
        """Run ``fn(i, *local_views)`` on every cell i = 1..p.

        Views are writable. If ``fn`` raises on any cell the named arrays are
        restored, so a failed superstep leaves no partial state.
        """
        arrays = [self.get(n) for n in names]
        backup = [a.copy() for a in arrays]
        try:
            for i in range(self.p):
                fn(i + 1, *(a[i, ...] for a in arrays))
        except BaseException:
            for n, b in zip(names, backup):
                self._arrays[n] = b
            raise
