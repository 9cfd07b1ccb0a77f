"""Exact permanents over the integers.

Everything here returns Python ``int``.  Ryser runs on an int64 numba
kernel whenever ``2**n * prod(row sums)`` provably fits, and on Python
integers otherwise; both walk the same Gray-code order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .parallel import map_ordered, split_range

NAIVE_LIMIT = 10
RYSER_LIMIT = 30
_I64_SAFE = 1 << 62


def as_int_matrix(a, square: bool = True) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in np.asarray(a, dtype=object).tolist()] if np.size(a) else []
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    if square and rows and len(rows) != len(rows[0]):
        raise ValueError(f"matrix must be square, got {len(rows)}x{len(rows[0])}")
    if any(x < 0 for r in rows for x in r):
        raise ValueError("entries must be non-negative")
    return rows


def _has_zero_line(a: list[list[int]]) -> bool:
    if any(not any(r) for r in a):
        return True
    return any(not any(r[j] for r in a) for j in range(len(a)))


def permanent_naive(a, limit: int = NAIVE_LIMIT) -> int:
    """Sum over all n! permutations.  Reference oracle only."""
    a = as_int_matrix(a)
    n = len(a)
    if n > limit:
        raise ValueError(f"naive permanent refused for n={n} > {limit}")
    total = 0
    for sigma in itertools.permutations(range(n)):
        p = 1
        for i, j in enumerate(sigma):
            p *= a[i][j]
            if not p:
                break
        total += p
    return total


def _ryser_range_py(a: list[list[int]], lo: int, hi: int) -> int:
    n = len(a)
    g = lo ^ (lo >> 1)
    rs = [sum(a[i][j] for j in range(n) if g >> j & 1) for i in range(n)]
    bits = bin(g).count("1")
    total = 0
    for k in range(lo, hi):
        if k > lo:
            j = (k & -k).bit_length() - 1
            g ^= 1 << j
            if g >> j & 1:
                bits += 1
                for i in range(n):
                    rs[i] += a[i][j]
            else:
                bits -= 1
                for i in range(n):
                    rs[i] -= a[i][j]
        if not bits:
            continue
        p = 1
        for x in rs:
            p *= x
            if not p:
                break
        total += -p if (n - bits) & 1 else p
    return total


def _int64_safe(a: list[list[int]]) -> bool:
    bound = 1 << len(a)
    for r in a:
        bound *= sum(r)
    return bound < _I64_SAFE


def ryser_partial(a, lo: int, hi: int) -> int:
    """Signed Ryser terms for Gray-code positions ``lo <= k < hi``.  Summing
    the partials of any partition of ``[0, 2**n)`` gives the permanent."""
    a = as_int_matrix(a)
    if _int64_safe(a):
        return int(_kernels.ryser_range(np.array(a, dtype=np.int64).reshape(len(a), len(a)), lo, hi))
    return _ryser_range_py(a, lo, hi)


def permanent_ryser(a, workers: int = 1, chunks: int | None = None) -> int:
    """Ryser's inclusion-exclusion with Gray-code row-sum updates.

    ``chunks`` splits the subset walk into contiguous ranges (default one per
    worker); the exact-integer reduction makes the result independent of it.
    """
    a = as_int_matrix(a)
    n = len(a)
    if n == 0:
        return 1
    if n > RYSER_LIMIT:
        raise ValueError(f"Ryser refused for n={n} > {RYSER_LIMIT}")
    if _has_zero_line(a):
        return 0
    pieces = split_range(0, 1 << n, chunks or workers)
    return sum(map_ordered(ryser_partial, [(a, lo, hi) for lo, hi in pieces], workers))


def permanent(a) -> int:
    return permanent_ryser(a)


# -- structural identities ---------------------------------------------------

def merge_columns_by_unit_row(a, i: int) -> np.ndarray | None:
    """Delete row ``i`` (1-based) whose support is one or two columns.

    Two ones: the two columns are replaced by their sum, placed at the first
    one's position.  One one: plain cofactor deletion of that column.  The
    permanent is preserved.  ``None`` signals an all-zero row (permanent 0).
    """
    a = np.array(as_int_matrix(a), dtype=object)
    n = a.shape[0]
    if not 1 <= i <= n:
        raise IndexError(f"row index {i} out of range 1..{n}")
    row = a[i - 1]
    if any(x not in (0, 1) for x in row):
        raise ValueError(f"row {i} is not 0/1-valued")
    supp = [j for j in range(n) if row[j]]
    if not supp:
        return None
    if len(supp) > 2:
        raise ValueError(f"row {i} has {len(supp)} ones; the merge identity needs at most two")
    rest = np.delete(a, i - 1, axis=0)
    if len(supp) == 2:
        j1, j2 = supp
        rest[:, j1] = rest[:, j1] + rest[:, j2]
        return np.delete(rest, j2, axis=1)
    return np.delete(rest, supp[0], axis=1)


def perm_subset_expansion(a, b, limit: int = 12) -> int:
    """Sum over column subsets alpha of perm[A_alpha | B_rest]."""
    a = np.array(as_int_matrix(a), dtype=object)
    b = np.array(as_int_matrix(b), dtype=object)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    n = a.shape[0]
    if n > limit:
        raise ValueError(f"subset expansion refused for n={n} > {limit}")
    total = 0
    for mask in range(1 << n):
        mixed = b.copy()
        for j in range(n):
            if mask >> j & 1:
                mixed[:, j] = a[:, j]
        total += permanent_ryser(mixed)
    return total


# -- block matrices ----------------------------------------------------------

BlockMatrix = Sequence[Sequence["np.ndarray | None"]]


def block_size(blocks: BlockMatrix) -> int:
    sizes = {np.asarray(b).shape for row in blocks for b in row if b is not None}
    if len(sizes) != 1:
        raise ValueError(f"blocks must share one square size, got {sorted(sizes)}")
    (shape,) = sizes
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError(f"blocks must be square, got {shape}")
    if any(len(r) != len(blocks[0]) for r in blocks):
        raise ValueError("ragged block matrix")
    return shape[0]


def block_dense(blocks: BlockMatrix) -> np.ndarray:
    M = block_size(blocks)
    z = np.zeros((M, M), dtype=object)
    return np.block([[z if b is None else np.asarray(b, dtype=object) for b in row] for row in blocks])


def _is_perm_matrix(b) -> bool:
    b = np.asarray(b)
    return bool(np.isin(b, (0, 1)).all() and (b.sum(0) == 1).all() and (b.sum(1) == 1).all())


def _add(x, y):
    if x is None:
        return y
    if y is None:
        return x
    return x + y


def _reduce_rows_once(blocks: list[list]) -> list[list] | None:
    """One row-side collapse, or None when no block row qualifies."""
    for i, row in enumerate(blocks):
        nz = [j for j, b in enumerate(row) if b is not None and np.any(b)]
        if not 1 <= len(nz) <= 2 or not all(_is_perm_matrix(row[j]) for j in nz):
            continue
        keep = [k for k in range(len(blocks)) if k != i]
        if len(nz) == 1:
            (j,) = nz
            return [[blocks[k][c] for c in range(len(row)) if c != j] for k in keep]
        # right-multiply both block columns by P^T so blocks (i, j1), (i, j2) become I
        aligned = {j: [None if r[j] is None else r[j] @ row[j].T for r in blocks] for j in nz}
        j1, j2 = nz
        merged = [_add(aligned[j1][k], aligned[j2][k]) for k in range(len(blocks))]
        out = []
        for k in keep:
            new_row = []
            for c in range(len(row)):
                if c == j2:
                    continue
                new_row.append(merged[k] if c == j1 else blocks[k][c])
            out.append(new_row)
        return out
    return None


def _transpose(blocks):
    return [[None if blocks[i][j] is None else blocks[i][j].T for i in range(len(blocks))]
            for j in range(len(blocks[0]))]


def reduce_block_identity(blocks: BlockMatrix) -> np.ndarray:
    """Collapse block rows/columns holding one or two permutation blocks
    (identity after alignment) until none remain; returns the dense integer
    matrix with the same permanent.  With nothing to collapse this is just
    the dense expansion."""
    block_size(blocks)
    if len(blocks) != len(blocks[0]):
        raise ValueError("block matrix must be square in blocks")
    cur = [[None if b is None else np.asarray(b, dtype=object) for b in row] for row in blocks]
    while len(cur) > 1:
        nxt = _reduce_rows_once(cur)
        if nxt is None:
            t = _reduce_rows_once(_transpose(cur))
            if t is None:
                break
            nxt = _transpose(t)
        cur = nxt
    M = block_size(blocks)
    if all(b is None for row in cur for b in row):
        return np.zeros((len(cur) * M,) * 2, dtype=object)
    z = np.zeros((M, M), dtype=object)
    return np.block([[z if b is None else b for b in row] for row in cur])


@dataclass(frozen=True)
class BlockPermanent:
    """Matrix-valued permanent; ``commuting`` is False when two non-zero
    input blocks fail to commute, in which case the value depends on the
    fixed row-order product convention."""

    value: np.ndarray
    commuting: bool


def block_matrix_permanent(blocks: BlockMatrix) -> BlockPermanent:
    M = block_size(blocks)
    m = len(blocks)
    if any(len(r) != m for r in blocks):
        raise ValueError("block matrix must be square in blocks")
    mats = [[None if b is None else np.asarray(b, dtype=object) for b in row] for row in blocks]
    total = np.zeros((M, M), dtype=object)
    for sigma in itertools.permutations(range(m)):
        prod = None
        for i, j in enumerate(sigma):
            b = mats[i][j]
            if b is None:
                prod = None
                break
            prod = b if prod is None else prod @ b
        if prod is not None:
            total = total + prod
    flat = [b for row in mats for b in row if b is not None]
    commuting = all(np.array_equal(x @ y, y @ x) for x, y in itertools.combinations(flat, 2))
    return BlockPermanent(total, commuting)
