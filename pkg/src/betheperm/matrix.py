"""Binary matrices, circulant exponent matrices, and 1-based index sets.

Matrices are plain numpy integer arrays.  Every index that crosses this
module's surface is 1-based; conversion to numpy offsets happens here and
nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    """Malformed matrix text.  ``line`` is the physical 1-based line number,
    ``row``/``column`` locate the offending data token (``None`` when the
    problem is in the header)."""

    def __init__(self, message: str, line: int, row: int | None = None, column: int | None = None):
        where = f"line {line}"
        if row is not None:
            where += f" (row {row}"
            where += f", token {column})" if column is not None else ")"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.row = row
        self.column = column


def as_binary(a) -> np.ndarray:
    """Validate and freeze a 0/1 matrix."""
    arr = np.array(a, dtype=np.int64, copy=True)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("binary matrix entries must be 0 or 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ExponentMatrix:
    """Block description of a quasi-cyclic matrix: ``-1`` is the zero block,
    ``s >= 0`` the identity cyclically shifted ``s`` times."""

    exps: tuple[tuple[int, ...], ...]
    lift_size: int

    def __post_init__(self):
        exps = tuple(tuple(int(x) for x in row) for row in self.exps)
        object.__setattr__(self, "exps", exps)
        if self.lift_size < 1:
            raise ValueError("lift size must be >= 1")
        if not exps or not exps[0] or any(len(r) != len(exps[0]) for r in exps):
            raise ValueError("exponent matrix must be a non-empty rectangle")
        for row in exps:
            for s in row:
                if not -1 <= s < self.lift_size:
                    raise ValueError(f"exponent {s} outside [-1, {self.lift_size - 1}]")

    @property
    def rows(self) -> int:
        return len(self.exps)

    @property
    def cols(self) -> int:
        return len(self.exps[0])


def shift_matrix(s: int, size: int) -> np.ndarray:
    """Identity with column j moved to column ((j - 1 + s) mod size) + 1."""
    out = np.zeros((size, size), dtype=np.int64)
    if s >= 0:
        idx = np.arange(size)
        out[idx, (idx + s) % size] = 1
    return out


def expand_exponents(e: ExponentMatrix) -> np.ndarray:
    M = e.lift_size
    return as_binary(np.block([[shift_matrix(s, M) for s in row] for row in e.exps]))


def _check_indices(idx: Iterable[int], bound: int, what: str) -> list[int]:
    out = [int(i) for i in idx]
    for i in out:
        if not 1 <= i <= bound:
            raise IndexError(f"{what} index {i} out of range 1..{bound}")
    return out


def index_set(idx: Iterable[int], bound: int) -> tuple[int, ...]:
    """Sorted, distinct, 1-based index set within ``1..bound``."""
    out = sorted(set(_check_indices(idx, bound, "set")))
    return tuple(out)


def submatrix(a, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> np.ndarray:
    """Rows and columns restricted (1-based) in the given order; ``None``
    keeps everything."""
    a = np.asarray(a)
    r = _check_indices(range(1, a.shape[0] + 1) if rows is None else rows, a.shape[0], "row")
    c = _check_indices(range(1, a.shape[1] + 1) if cols is None else cols, a.shape[1], "column")
    return a[np.ix_([i - 1 for i in r], [j - 1 for j in c])]


def row_support(a, i: int) -> tuple[int, ...]:
    a = np.asarray(a)
    _check_indices([i], a.shape[0], "row")
    return tuple(int(j) + 1 for j in np.flatnonzero(a[i - 1]))


def without(idx: Sequence[int], *drop: int) -> tuple[int, ...]:
    """``idx`` minus the listed elements, order preserved."""
    return tuple(i for i in idx if i not in drop)


# -- text formats -----------------------------------------------------------

def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield lineno, s.split()


def _ints(tokens, lineno, row=None):
    out = []
    for k, tok in enumerate(tokens, start=1):
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"not an integer: {tok!r}", lineno, row, k) from None
    return out


def _header(lines, width: int, what: str):
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise ParseError(f"missing {what} header", 1) from None
    if len(tokens) != width:
        raise ParseError(f"header must have {width} integers, got {len(tokens)}", lineno)
    vals = _ints(tokens, lineno)
    if any(v < 1 for v in vals):
        raise ParseError("header values must be positive", lineno)
    return vals


def _body(lines, m: int, n: int, allowed=None):
    rows = []
    for lineno, tokens in lines:
        r = len(rows) + 1
        if r > m:
            raise ParseError(f"more than {m} rows", lineno, r)
        if len(tokens) != n:
            raise ParseError(f"expected {n} tokens, got {len(tokens)}", lineno, r)
        vals = _ints(tokens, lineno, r)
        if allowed is not None:
            for k, v in enumerate(vals, start=1):
                if not allowed(v):
                    raise ParseError(f"invalid symbol {v}", lineno, r, k)
        rows.append(vals)
    if len(rows) != m:
        raise ParseError(f"expected {m} rows, got {len(rows)}", (lineno if rows else 1), len(rows) + 1)
    return rows


def parse_dense(text: str) -> np.ndarray:
    """``m n`` header then ``m`` rows of ``n`` 0/1 tokens; ``#`` lines are
    comments."""
    lines = _data_lines(text)
    m, n = _header(lines, 2, "'m n'")
    return as_binary(_body(lines, m, n, allowed=lambda v: v in (0, 1)))


def serialize_dense(a) -> str:
    a = np.asarray(a)
    out = [f"{a.shape[0]} {a.shape[1]}"]
    out += [" ".join(str(int(x)) for x in row) for row in a]
    return "\n".join(out) + "\n"


def parse_exponents(text: str) -> ExponentMatrix:
    lines = _data_lines(text)
    m, n, M = _header(lines, 3, "'m n M'")
    rows = _body(lines, m, n, allowed=lambda v: -1 <= v < M)
    return ExponentMatrix(tuple(map(tuple, rows)), M)


def serialize_exponents(e: ExponentMatrix) -> str:
    out = [f"{e.rows} {e.cols} {e.lift_size}"]
    out += [" ".join(str(s) for s in row) for row in e.exps]
    return "\n".join(out) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    """Dense or exponent format, told apart by the header width."""
    for lineno, tokens in _data_lines(text):
        if len(tokens) == 3:
            return expand_exponents(parse_exponents(text))
        return parse_dense(text)
    raise ParseError("empty input", 1)


def gf2_syndrome(h, v) -> np.ndarray:
    return (np.asarray(h, dtype=np.int64) @ np.asarray(v, dtype=np.int64)) % 2
