"""2D reference algorithms on an s x s torus: Cannon, semi-systolic and
semi-hyper-systolic.

Shifts use the same convention as the ring: a stride k along an axis means
a cell receives from the cell k positions further along that axis. "Left"
is stride +1 on axis 1, "up" is +1 on axis 0, "down" is -1 on axis 0.
Broadcasts are counted separately and never appear in the shift log.
"""
from __future__ import annotations

import numpy as np

from .algorithms import BACKSHIFT, MAIN, PRESHIFT, RunReport
from .dense import as_matrix
from .errors import BasisError, ShapeError
from .layouts import skew_grid, unskew_grid
from .ring import CostModel, ShiftEntry, ShiftLog


class Torus:
    def __init__(self, side: int, cost_model: CostModel | None = None):
        if side < 1:
            raise ValueError(f"torus side must be positive, got {side}")
        self.side = side
        self.cost_model = cost_model or CostModel.constant()
        self.log = ShiftLog()
        self.broadcasts = 0
        self.grids: dict[str, np.ndarray] = {}

    def shift(self, name: str, axis: int, stride: int, phase: str = "") -> None:
        self.grids[name] = np.roll(self.grids[name], -stride, axis=axis)
        self.log.append(ShiftEntry(name, stride, self.side * self.side, self.cost_model(stride, self.side), phase))

    def skew(self, name: str, axis: int, phase: str = "preskew") -> None:
        """Irregular pre-skew: line i along ``axis`` moves by stride i."""
        g = self.grids[name]
        out = np.empty_like(g)
        for i in range(self.side):
            if axis == 1:
                out[i, :] = np.roll(g[i, :], -i)
            else:
                out[:, i] = np.roll(g[:, i], -i)
        self.grids[name] = out
        worst = max(self.cost_model(i, self.side) for i in range(self.side))
        self.log.append(ShiftEntry(name, 0, self.side * self.side, worst, phase))

    def broadcast_row(self, name: str, row: int) -> np.ndarray:
        """Copy row ``row`` down every column (zero-cost, counted once)."""
        self.broadcasts += 1
        g = self.grids[name]
        return np.broadcast_to(g[row], g.shape)


def _operands(a, b, side: int):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != (side, side) or b.shape != (side, side):
        raise ShapeError(f"expected {side}x{side} operands, got {a.shape} and {b.shape}")
    return a, b


def _report(algo: str, torus: Torus, result, **kw) -> RunReport:
    s = torus.side
    return RunReport(algo, s if algo != "cannon" else s * s, result, list(torus.log.entries),
                     matmul_flops=2 * s ** 3, broadcasts=torus.broadcasts, **kw)


def cannon_matmul(grid_side: int, a, b, cost_model: CostModel | None = None) -> RunReport:
    """Cannon's algorithm: pre-skew, then s multiply steps with unit shifts.

    The pre-skew is logged as one event per matrix in phase ``preskew``; the
    systolic phase shifts A left and B up after every step but the last,
    giving 2s - 2 shift steps.
    """
    s = grid_side
    a, b = _operands(a, b, s)
    t = Torus(s, cost_model)
    t.grids["A"], t.grids["B"] = a.copy(), b.copy()
    t.grids["C"] = np.zeros((s, s), dtype=np.result_type(a, b))
    if s > 1:
        t.skew("A", axis=1)
        t.skew("B", axis=0)
    for step in range(s):
        t.grids["C"] += t.grids["A"] * t.grids["B"]
        if step < s - 1:
            t.shift("A", axis=1, stride=1, phase="systolic")
            t.shift("B", axis=0, stride=1, phase="systolic")
    return _report("cannon", t, t.grids["C"])


def semi_systolic_2d(grid_side: int, a, b, cost_model: CostModel | None = None) -> RunReport:
    """Broadcast-based product on a column-skewed s x s array.

    In step j row j of B is broadcast down the columns; A then moves one
    position left and one down, returning to its start after s steps.
    """
    s = grid_side
    a, b = _operands(a, b, s)
    t = Torus(s, cost_model)
    t.grids["A"] = skew_grid(a[:, :, None, None])[:, :, 0, 0].T
    t.grids["B"] = skew_grid(b[:, :, None, None])[:, :, 0, 0].T
    c = np.zeros((s, s), dtype=np.result_type(a, b))
    for j in range(s):
        c += t.grids["A"] * t.broadcast_row("B", j)
        t.shift("A", axis=1, stride=1, phase=MAIN)
        t.shift("A", axis=0, stride=-1, phase=MAIN)
    result = unskew_grid(c.T[:, :, None, None])[:, :, 0, 0]
    return _report("semi2d", t, result)


def semi_hyper_systolic_2d(grid_side: int, a, b, K: int, cost_model: CostModel | None = None) -> RunReport:
    """Semi-hyper-systolic product with K auxiliary result arrays.

    Row r of B starts shifted right by r mod K. A moves down every step and
    left by K after every K-th step; the auxiliary arrays are folded with
    unit left shifts at the end.
    """
    s = grid_side
    if K < 1 or s % K:
        raise BasisError(f"K={K} does not divide the grid side {s}")
    a, b = _operands(a, b, s)
    t = Torus(s, cost_model)
    t.grids["A"] = skew_grid(a[:, :, None, None])[:, :, 0, 0].T
    bs = skew_grid(b[:, :, None, None])[:, :, 0, 0].T
    for l0 in range(1, K):
        rows = [r for r in range(s) if r % K == l0]
        bs[rows] = np.roll(bs[rows], l0, axis=1)
        t.log.append(ShiftEntry("B", -l0, len(rows) * s, t.cost_model(-l0, s), PRESHIFT))
    t.grids["B"] = bs
    dtype = np.result_type(a, b)
    for l in range(K):
        t.grids[f"C{l}"] = np.zeros((s, s), dtype=dtype)
    for step in range(s):
        l = step % K
        t.grids[f"C{l}"] = t.grids[f"C{l}"] + t.grids["A"] * t.broadcast_row("B", step)
        t.shift("A", axis=0, stride=-1, phase=MAIN)
        if l == K - 1:
            t.shift("A", axis=1, stride=K, phase=MAIN)
    for l in range(K - 1, 0, -1):
        t.shift(f"C{l}", axis=1, stride=1, phase=BACKSHIFT)
        t.grids[f"C{l - 1}"] = t.grids[f"C{l - 1}"] + t.grids[f"C{l}"]
    result = unskew_grid(t.grids["C0"].T[:, :, None, None])[:, :, 0, 0]
    return _report("semihyper2d", t, result, K=K, K_tilde=s // K, preshift_phases=1)
