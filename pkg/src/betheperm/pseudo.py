"""Fundamental-cone membership, pseudo-weights, and permanent-based
candidate pseudocodewords.

Vectors built from exact permanents stay exact (``int``/``Fraction``) and are
checked against the cone with zero tolerance; Bethe-based vectors are floats
and use a relative tolerance ``tol * max(1, rhs)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bethe import DEFAULT_TOL, minimize_bethe
from .lifting import _check_budget, degree_M_bethe_perm, root_M
from .matrix import index_set, row_support, submatrix, without
from .permanent import permanent_ryser

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class PseudoVector:
    """``origin`` is one of ``perm``, ``bethe_M``, ``bethe_limit``, ``raw``.
    ``powers`` holds the exact M-th powers of degree-M components; ``gaps``
    the certified free-energy gaps of limit components."""

    values: tuple
    exact: bool
    origin: str = "raw"
    M: int | None = None
    beta: tuple[int, ...] | None = None
    powers: tuple[Fraction, ...] | None = None
    gaps: tuple[float, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        vals = tuple(Fraction(v) if self.exact else float(v) for v in self.values)
        if any(v < 0 for v in vals):
            raise ValueError("pseudo-vector entries must be non-negative")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)


def as_pseudo(w) -> PseudoVector:
    if isinstance(w, PseudoVector):
        return w
    vals = list(w)
    exact = all(isinstance(v, (int, Fraction, np.integer)) for v in vals)
    return PseudoVector(tuple(int(v) if isinstance(v, np.integer) else v for v in vals), exact)


@dataclass(frozen=True)
class Violation:
    """``row`` is ``None`` for a negative entry.  Positions are 1-based."""

    row: int | None
    position: int
    lhs: object
    rhs: object
    slack: object


@dataclass(frozen=True)
class ConeReport:
    member: bool
    violations: tuple[Violation, ...]
    tol: float


def in_fundamental_cone(H, w, tol: float | None = None) -> ConeReport:
    """Every entry non-negative, and on every row each support entry is at
    most the sum of the other support entries."""
    H = np.asarray(H)
    w = as_pseudo(w)
    if len(w) != H.shape[1]:
        raise ValueError(f"vector length {len(w)} != {H.shape[1]} columns")
    if tol is None:
        tol = 0.0 if w.exact else FLOAT_TOL
    if tol < 0:
        raise ValueError("tol must be >= 0")
    vals = w.values
    slackfn = (lambda rhs: Fraction(tol) * max(1, rhs)) if w.exact else (lambda rhs: tol * max(1.0, rhs))
    out = []
    for j, v in enumerate(vals, start=1):
        if v < 0:
            out.append(Violation(None, j, 0, v, v))
    for i in range(1, H.shape[0] + 1):
        supp = row_support(H, i)
        total = sum(vals[j - 1] for j in supp)
        for j in supp:
            lhs = vals[j - 1]
            rhs = total - lhs
            if lhs > rhs + slackfn(rhs):
                out.append(Violation(i, j, lhs, rhs, rhs - lhs))
    return ConeReport(not out, tuple(out), tol)


def awgnc_pseudo_weight(w):
    """``||w||_1^2 / ||w||_2^2``; a ``Fraction`` when ``w`` is exact."""
    w = as_pseudo(w)
    if w.is_zero():
        raise ValueError("pseudo-weight of the zero vector is undefined")
    if w.exact:
        return Fraction(sum(w.values) ** 2, sum(v * v for v in w.values))
    a = w.as_array()
    return float(a.sum() ** 2 / (a @ a))


def _beta(H, beta) -> tuple[int, ...]:
    m, n = np.asarray(H).shape
    b = index_set(beta, n)
    if len(b) != len(list(beta)):
        raise ValueError("beta has repeated indices")
    if len(b) != m + 1:
        raise ValueError(f"beta must have {m + 1} elements, got {len(b)}")
    return b


def _components(H, beta, fn) -> list:
    n = np.asarray(H).shape[1]
    out = [0] * n
    for i in beta:
        out[i - 1] = fn(submatrix(H, None, without(beta, i)))
    return out


def perm_vector(H, beta: Sequence[int]) -> PseudoVector:
    b = _beta(H, beta)
    return PseudoVector(tuple(_components(H, b, permanent_ryser)), True, "perm", beta=b)


def bethe_perm_vector_M(H, beta: Sequence[int], M: int, budget=None, workers: int = 1) -> PseudoVector:
    """Degree-M components; exact when ``M == 1``, else floats with the exact
    M-th powers kept in ``powers``."""
    b = _beta(H, beta)
    means = [Fraction(0)] * np.asarray(H).shape[1]
    for i in b:
        means[i - 1] = degree_M_bethe_perm(submatrix(H, None, without(b, i)), M, budget, workers).mean
    if M == 1:
        return PseudoVector(tuple(means), True, "bethe_M", M, b, tuple(means))
    return PseudoVector(tuple(root_M(x, M) for x in means), False, "bethe_M", M, b, tuple(means))


def bethe_perm_vector(H, beta: Sequence[int], tol: float = DEFAULT_TOL) -> PseudoVector:
    b = _beta(H, beta)
    results = _components(H, b, lambda a: minimize_bethe(a, tol, strict=True))
    vals = tuple(r.value if r else 0.0 for r in results)
    gaps = tuple(r.gap if r else 0.0 for r in results)
    return PseudoVector(vals, False, "bethe_limit", beta=b, gaps=gaps)


def proportional(w, v, tol: float = FLOAT_TOL) -> bool:
    """Some ``alpha > 0`` with ``w = alpha * v`` (exact when both are)."""
    w, v = as_pseudo(w), as_pseudo(v)
    if len(w) != len(v):
        raise ValueError("length mismatch")
    if w.is_zero() or v.is_zero():
        return w.is_zero() and v.is_zero()
    k = next(i for i, x in enumerate(v.values) if x != 0)
    if w.values[k] == 0:
        return False
    if w.exact and v.exact:
        alpha = w.values[k] / v.values[k]
        return all(a == alpha * b for a, b in zip(w.values, v.values))
    a, b = w.as_array(), v.as_array()
    alpha = a[k] / b[k]
    return bool(np.all(np.abs(a - alpha * b) <= tol * np.maximum(1.0, np.abs(a))))


def root_M_scale(v, M: int) -> PseudoVector:
    v = as_pseudo(v)
    if M == 1:
        return v
    vals = tuple(root_M(x, M) if v.exact else float(x) ** (1.0 / M) for x in v.values)
    return PseudoVector(vals, False, v.origin, M, v.beta)


FAMILIES = ("perm", "bethe_M", "bethe_limit")


def min_pseudo_weight_bound(H, family: str = "perm", M: int = 1, tol: float = DEFAULT_TOL, budget=None, workers: int = 1):
    """Smallest pseudo-weight over all nonzero vectors of the family, with the
    first (lexicographic) ``beta`` achieving it.  ``(inf, None)`` if every
    vector is zero."""
    m, n = np.asarray(H).shape
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    _check_budget(math.comb(n, m + 1), budget)
    best, arg = math.inf, None
    for beta in itertools.combinations(range(1, n + 1), m + 1):
        if family == "perm":
            w = perm_vector(H, beta)
        elif family == "bethe_M":
            w = bethe_perm_vector_M(H, beta, M, budget, workers)
        else:
            w = bethe_perm_vector(H, beta, tol)
        if w.is_zero():
            continue
        wt = awgnc_pseudo_weight(w)
        if wt < best:
            best, arg = wt, beta
    return best, arg
