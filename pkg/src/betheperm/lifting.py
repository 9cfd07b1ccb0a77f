"""Permutation liftings of a protomatrix and exact degree-M averages.

A lifting assigns a permutation of ``1..M`` to every cell of an ``m x n``
matrix; the lifted matrix replaces a one by that permutation matrix and a
zero by the zero block.  Averages over all liftings are kept as exact
``Fraction`` values; the M-th root is the only floating-point step.

Enumeration is mixed-radix over per-cell permutation ranks, cells in
row-major order, the last cell varying fastest.  Rank ranges can be
split across worker processes and reduced by exact addition.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .parallel import map_ordered, split_range
from .permanent import _I64_SAFE, permanent_ryser

DEFAULT_BUDGET = 10**8
BUDGET_PRESETS = {"small": 10**6, "default": DEFAULT_BUDGET, "large": 10**10}
BUDGET_ENV = "BETHEPERM_BUDGET"


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} liftings, budget is {budget}")
        self.required = required
        self.budget = budget


def parse_budget(text: str) -> int:
    if text in BUDGET_PRESETS:
        return BUDGET_PRESETS[text]
    value = int(float(text)) if "e" in text.lower() else int(text)
    if value < 1:
        raise ValueError("budget must be positive")
    return value


def resolve_budget(budget: int | str | None = None) -> int:
    """Explicit value, else ``$BETHEPERM_BUDGET``, else the default."""
    if budget is None:
        budget = os.environ.get(BUDGET_ENV)
        if budget is None:
            return DEFAULT_BUDGET
    return parse_budget(budget) if isinstance(budget, str) else int(budget)


def _check_budget(required: int, budget) -> None:
    limit = resolve_budget(budget)
    if required > limit:
        raise BudgetExceeded(required, limit)


# -- assignments -------------------------------------------------------------

def permutations_of(M: int) -> list[tuple[int, ...]]:
    """All permutations of ``1..M`` in lexicographic order."""
    return [tuple(x + 1 for x in p) for p in itertools.permutations(range(M))]


def permutation_matrix(p: Sequence[int]) -> np.ndarray:
    """Row ``x`` has its one in column ``p[x]`` (both 1-based)."""
    M = len(p)
    out = np.zeros((M, M), dtype=np.int64)
    out[np.arange(M), np.asarray(p) - 1] = 1
    return out


@dataclass(frozen=True)
class LiftingAssignment:
    """One permutation of ``1..M`` per cell, row-major."""

    m: int
    n: int
    M: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.perms) != self.m * self.n:
            raise ValueError(f"need {self.m * self.n} cell permutations, got {len(self.perms)}")
        target = tuple(range(1, self.M + 1))
        for p in self.perms:
            if tuple(sorted(p)) != target:
                raise ValueError(f"{p} is not a permutation of 1..{self.M}")

    def cell(self, i: int, j: int) -> tuple[int, ...]:
        """Permutation at 1-based cell ``(i, j)``."""
        return self.perms[(i - 1) * self.n + (j - 1)]


def lifting_count(m: int, n: int, M: int) -> int:
    return math.factorial(M) ** (m * n)


def enumerate_liftings(m: int, n: int, M: int, budget=None) -> Iterator[LiftingAssignment]:
    """Every assignment in lexicographic order of per-cell ranks."""
    _check_budget(lifting_count(m, n, M), budget)
    perms = permutations_of(M)
    for combo in itertools.product(perms, repeat=m * n):
        yield LiftingAssignment(m, n, M, combo)


def lift(theta, P: LiftingAssignment) -> np.ndarray:
    theta = np.asarray(theta)
    if theta.shape != (P.m, P.n):
        raise ValueError(f"protomatrix is {theta.shape}, assignment is {(P.m, P.n)}")
    M = P.M
    out = np.zeros((P.m * M, P.n * M), dtype=np.int64)
    for i in range(P.m):
        for j in range(P.n):
            if theta[i, j]:
                out[i * M:(i + 1) * M, j * M:(j + 1) * M] = int(theta[i, j]) * permutation_matrix(P.cell(i + 1, j + 1))
    return out


# -- exact averages ----------------------------------------------------------

def root_M(mean: Fraction, M: int) -> float:
    """``mean ** (1/M)`` as a float, refined by one exact Newton step."""
    mean = Fraction(mean)
    if mean == 0:
        return 0.0
    if M == 1:
        return float(mean)
    r = math.exp((math.log(mean.numerator) - math.log(mean.denominator)) / M)
    x = Fraction(r)
    x -= (x**M - mean) / (M * x ** (M - 1))
    return float(x)


@dataclass(frozen=True)
class AverageResult:
    sum: int
    count: int
    mean: Fraction
    root_M: float
    M: int


def _average(total: int, count: int, M: int) -> AverageResult:
    mean = Fraction(total, count)
    return AverageResult(total, count, mean, root_M(mean, M), M)


def _lift_chunk_py(size, M, fixed, free, lo, hi) -> int:
    perms = [permutation_matrix(p) for p in permutations_of(M)]
    k = len(perms)
    base = np.zeros((size * M, size * M), dtype=np.int64)
    for r, c in fixed:
        base[r * M:(r + 1) * M, c * M:(c + 1) * M] += np.eye(M, dtype=np.int64)
    total = 0
    for rank in range(lo, hi):
        a = base.copy()
        rem = rank
        for r, c in reversed(free):
            rem, d = divmod(rem, k)
            a[r * M:(r + 1) * M, c * M:(c + 1) * M] += perms[d]
        total += permanent_ryser(a)
    return total


def _lift_chunk(size, M, fixed, free, lo, hi) -> int:
    rows = [0] * size
    for r, _ in list(fixed) + list(free):
        rows[r] += 1
    bound = 1 << (size * M)
    for cnt in rows:
        bound *= cnt**M
    if bound >= _I64_SAFE:
        return _lift_chunk_py(size, M, fixed, free, lo, hi)
    arr = lambda xs: np.array(xs, dtype=np.int64).reshape(-1)
    perms = np.array(list(itertools.permutations(range(M))), dtype=np.int64).reshape(-1, M)
    return int(_kernels.lift_sum_range(
        size, M,
        arr([r for r, _ in fixed]), arr([c for _, c in fixed]),
        arr([r for r, _ in free]), arr([c for _, c in free]),
        perms, lo, hi,
    ))


def lift_sum(size: int, M: int, fixed, free, budget=None, workers: int = 1) -> tuple[int, int]:
    """Sum of permanents over all assignments to the ``free`` cells (0-based
    block positions) with identity blocks on ``fixed`` cells.  Repeated
    cells add.  Returns ``(sum, count)``."""
    fixed, free = [tuple(x) for x in fixed], [tuple(x) for x in free]
    count = math.factorial(M) ** len(free)
    _check_budget(count, budget)
    pieces = split_range(0, count, max(1, workers))
    parts = map_ordered(_lift_chunk, [(size, M, fixed, free, lo, hi) for lo, hi in pieces], workers)
    return sum(parts), count


def _square_binary(theta) -> np.ndarray:
    theta = np.asarray(theta)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1] or theta.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {theta.shape}")
    if not np.isin(theta, (0, 1)).all():
        raise ValueError("protomatrix entries must be 0 or 1")
    return theta.astype(np.int64)


def _cells(theta) -> list[tuple[int, int]]:
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(theta))]


def degree_M_bethe_perm_canonical(theta, M: int, budget=None, workers: int = 1) -> AverageResult:
    """Average over liftings whose first block row and first block column are
    identities; equal to the full average when row 1 and column 1 of
    ``theta`` are all ones."""
    theta = _square_binary(theta)
    if not (theta[0].all() and theta[:, 0].all()):
        raise ValueError("canonical enumeration needs an all-ones first row and first column")
    cells = _cells(theta)
    fixed = [c for c in cells if c[0] == 0 or c[1] == 0]
    free = [c for c in cells if c[0] and c[1]]
    total, count = lift_sum(theta.shape[0], M, fixed, free, budget, workers)
    return _average(total, count, M)


def degree_M_bethe_perm(theta, M: int, budget=None, workers: int = 1, canonical: bool | None = None) -> AverageResult:
    """Exact average of ``perm(lift(theta, P))`` over every lifting ``P``.

    Only nonzero cells are enumerated; zero cells give zero blocks for every
    permutation, so the mean is unchanged.  ``canonical=None`` switches to the
    reduced enumeration whenever some row and some column are all ones
    (after moving them to the front).
    """
    theta = _square_binary(theta)
    n = theta.shape[0]
    if M < 1:
        raise ValueError("M must be >= 1")
    cells = _cells(theta)
    # a perfect matching in a lift projects onto one in supp(theta)
    if permanent_ryser(theta) == 0:
        return _average(0, math.factorial(M) ** len(cells), M)
    full_rows = [i for i in range(n) if theta[i].all()]
    full_cols = [j for j in range(n) if theta[:, j].all()]
    if canonical is None:
        canonical = bool(full_rows and full_cols)
    if canonical:
        if not (full_rows and full_cols):
            raise ValueError("canonical enumeration needs an all-ones row and column")
        i, j = full_rows[0], full_cols[0]
        rows = [i] + [k for k in range(n) if k != i]
        cols = [j] + [k for k in range(n) if k != j]
        return degree_M_bethe_perm_canonical(theta[np.ix_(rows, cols)], M, budget, workers)
    total, count = lift_sum(n, M, [], cells, budget, workers)
    return _average(total, count, M)


# -- named averages and closed forms -----------------------------------------

def q(m: int, M: int, budget=None, workers: int = 1) -> Fraction:
    """Mean lifted permanent of the ``m x m`` all-ones matrix."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return degree_M_bethe_perm_canonical(np.ones((m, m), dtype=np.int64), M, budget, workers).mean


def t_block(m: int, M: int, budget=None, workers: int = 1) -> Fraction:
    """Block form with one zero: top row ``I..I 0``, last column ``0 I..I``,
    the remaining ``(m-1)^2`` cells free."""
    fixed = [(0, j) for j in range(m - 1)] + [(i, m - 1) for i in range(1, m)]
    free = [(i, j) for i in range(1, m) for j in range(m - 1)]
    total, count = lift_sum(m, M, fixed, free, budget, workers)
    return Fraction(total, count)


def that_block(m: int, M: int, budget=None, workers: int = 1) -> Fraction:
    """As ``t_block`` with the free cell at block (2, m-1) also zero."""
    if m < 2:
        raise ValueError("m must be >= 2")
    fixed = [(0, j) for j in range(m - 1)] + [(i, m - 1) for i in range(1, m)]
    free = [(i, j) for i in range(1, m) for j in range(m - 1) if (i, j) != (1, m - 2)]
    total, count = lift_sum(m, M, fixed, free, budget, workers)
    return Fraction(total, count)


def _reduced(M: int, k: int, budget, workers) -> Fraction:
    # I + P_1 + ... + P_k on one M x M block
    total, count = lift_sum(1, M, [(0, 0)], [(0, 0)] * k, budget, workers)
    return Fraction(total, count)


def q2(M: int, budget=None, workers: int = 1) -> Fraction:
    return _reduced(M, 1, budget, workers)


def t3(M: int, budget=None, workers: int = 1) -> Fraction:
    return _reduced(M, 3, budget, workers)


def that3(M: int, budget=None, workers: int = 1) -> Fraction:
    return _reduced(M, 2, budget, workers)


def q2_closed(M: int) -> int:
    return M + 1


def t3_closed(M: int) -> Fraction:
    f, C = math.factorial, math.comb
    total = 0
    for r in range(M + 1):
        inner = sum(C(r, s) * f(M - r + s) * f(M - s) for s in range(r + 1))
        outer = sum(C(M - r, t) * f(M - t) * f(r + t) for t in range(M - r + 1))
        total += C(M, r) * inner * outer
    return Fraction(total, f(M) ** 3)


def that3_closed(M: int) -> Fraction:
    f, C = math.factorial, math.comb
    total = sum(C(M, r) * sum(C(r, s) * f(M - r + s) * f(M - s) for s in range(r + 1)) * f(r) for r in range(M + 1))
    return Fraction(total, f(M) ** 2)
