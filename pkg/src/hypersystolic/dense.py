"""Plain dense matrices: the naive product oracle, comparison and text I/O.

Matrices are 2D numpy arrays. Integer inputs stay integer so that oracle
comparisons are bit-exact; ``entry`` gives the 1-based element access used
throughout the docs.
"""
from __future__ import annotations

import io
from typing import Iterable, TextIO

import numpy as np

from .errors import ShapeError


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2D matrix, got shape {arr.shape}")
    return arr


def entry(m, i: int, j: int):
    """Element ``m_{i,j}`` with 1-based indices."""
    arr = as_matrix(m)
    rows, cols = arr.shape
    if not (1 <= i <= rows and 1 <= j <= cols):
        raise IndexError(f"({i}, {j}) outside 1..{rows} x 1..{cols}")
    return arr[i - 1, j - 1]


def identity(n: int, dtype=np.int64) -> np.ndarray:
    return np.eye(n, dtype=dtype)


def naive_multiply(a, b) -> np.ndarray:
    """Triple-loop product ``c_ij = sum_k a_ik * b_kj``.

    Deliberately independent of numpy's matmul; this is the oracle every
    distributed algorithm is checked against.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    n, m = a.shape
    q = b.shape[1]
    rows_a = a.tolist()
    rows_b = b.tolist()
    out = []
    for i in range(n):
        row = []
        for j in range(q):
            acc = rows_a[i][0] * rows_b[0][j]
            for k in range(1, m):
                acc += rows_a[i][k] * rows_b[k][j]
            row.append(acc)
        out.append(row)
    return np.array(out, dtype=np.result_type(a, b))


def approx_equal(a, b, tol: float = 0.0) -> bool:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if tol == 0:
        return bool(np.array_equal(a, b))
    return bool(np.max(np.abs(a - b)) <= tol)


# Text format: "rows cols" header, then one line per row. Floats are written
# with repr(), which is the shortest string that round-trips a double.

def _format_scalar(x) -> str:
    if isinstance(x, (np.integer, int)):
        return str(int(x))
    if isinstance(x, (np.complexfloating, complex)):
        return repr(complex(x)).strip("()")
    return repr(float(x))


def _parse_scalar(tok: str):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        return complex(tok)


def write_matrix(m, stream: TextIO) -> None:
    arr = as_matrix(m)
    stream.write(f"{arr.shape[0]} {arr.shape[1]}\n")
    for row in arr.tolist():
        stream.write(" ".join(_format_scalar(x) for x in row) + "\n")


def dumps_matrix(m) -> str:
    buf = io.StringIO()
    write_matrix(m, buf)
    return buf.getvalue()


def read_matrix(stream: TextIO | Iterable[str]) -> np.ndarray:
    lines = [ln for ln in (l.strip() for l in stream) if ln]
    if not lines:
        raise ValueError("empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad header line: {lines[0]!r}")
    rows, cols = int(header[0]), int(header[1])
    if rows < 1 or cols < 1:
        raise ValueError(f"bad dimensions {rows}x{cols}")
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    values = []
    for n, line in enumerate(body, start=2):
        toks = line.split()
        if len(toks) != cols:
            raise ValueError(f"line {n}: expected {cols} values, found {len(toks)}")
        values.append([_parse_scalar(t) for t in toks])
    flat = [x for row in values for x in row]
    if all(isinstance(x, int) for x in flat):
        dtype = np.int64
    elif any(isinstance(x, complex) for x in flat):
        dtype = np.complex128
    else:
        dtype = np.float64
    return np.array(values, dtype=dtype)


def loads_matrix(text: str) -> np.ndarray:
    return read_matrix(io.StringIO(text))
