"""Bethe permanent via free-energy minimization over doubly stochastic
matrices supported on ``supp(theta)``.

    F(g) = sum_{theta_ij > 0} g_ij ln(g_ij / theta_ij) - (1 - g_ij) ln(1 - g_ij)

and ``perm_B(theta) = exp(-min F)``.  F is convex on the polytope but not
outside it, so the search stays feasible: prune edges that lie in no perfect
matching, split into connected components, start each from Sinkhorn
scaling, and take damped Newton steps in the null space of the row/column
sum constraints.  Optimality is certified by the Frank-Wolfe duality gap,
``<grad F, g - s>`` with ``s`` the best assignment for the current
gradient, which bounds ``F(g) - min F`` from above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, maximum_bipartite_matching

DEFAULT_TOL = 1e-8
MAX_ITER = 50_000
SINKHORN_ROUNDS = 200
SINKHORN_RESIDUAL = 1e-12


class NonConvergence(RuntimeError):
    def __init__(self, result: "BetheResult"):
        super().__init__(f"Bethe minimization stopped at gap {result.gap:.3g} after {result.iterations} iterations")
        self.result = result


@dataclass(frozen=True)
class BetheResult:
    value: float
    minimizer: np.ndarray
    gap: float
    iterations: int
    converged: bool
    free_energy: float


def _as_theta(theta) -> np.ndarray:
    t = np.asarray(theta, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {t.shape}")
    if (t < 0).any() or not np.isfinite(t).all():
        raise ValueError("entries must be finite and non-negative")
    return t


def bethe_free_energy(theta, gamma) -> float:
    t = _as_theta(theta)
    g = np.asarray(gamma, dtype=float)
    if g.shape != t.shape:
        raise ValueError(f"shape mismatch {g.shape} vs {t.shape}")
    if (g > 1 + 1e-12).any() or (g < -1e-12).any():
        raise ValueError("gamma entries must lie in [0, 1]")
    if (g[t == 0] > 0).any():
        raise ValueError("gamma is positive where theta is zero")
    sup = t > 0
    x = np.clip(g[sup], 0.0, 1.0)
    w = t[sup]
    pos = x > 0
    rest = x < 1
    f = np.sum(x[pos] * np.log(x[pos] / w[pos]))
    f -= np.sum((1 - x[rest]) * np.log1p(-x[rest]))
    return float(f)


def _matching_size(mask: np.ndarray) -> int:
    match = maximum_bipartite_matching(csr_matrix(mask.astype(np.int8)), perm_type="column")
    return int((match >= 0).sum())


def has_perfect_matching(theta) -> bool:
    t = np.asarray(theta)
    if t.shape[0] == 0:
        return True
    return _matching_size(t > 0) == t.shape[0]


def allowed_edges(theta) -> np.ndarray:
    """Mask of support entries that lie on some perfect matching."""
    sup = np.asarray(theta) > 0
    n = sup.shape[0]
    out = np.zeros_like(sup)
    for i, j in zip(*np.nonzero(sup)):
        if n == 1:
            out[i, j] = True
            continue
        minor = np.delete(np.delete(sup, i, axis=0), j, axis=1)
        out[i, j] = _matching_size(minor) == n - 1
    return out


def _sinkhorn(mask: np.ndarray) -> np.ndarray:
    g = mask.astype(float)
    for _ in range(SINKHORN_ROUNDS):
        g /= g.sum(axis=1, keepdims=True)
        g /= g.sum(axis=0, keepdims=True)
        if np.abs(g.sum(axis=1) - 1).max() < SINKHORN_RESIDUAL:
            break
    return g


class _Component:
    """One connected block of allowed edges, optimized on its edge list."""

    def __init__(self, theta: np.ndarray, rows: np.ndarray, cols: np.ndarray, mask: np.ndarray):
        self.rows, self.cols = rows, cols
        sub = mask[np.ix_(rows, cols)]
        self.ei, self.ej = np.nonzero(sub)
        self.w = theta[np.ix_(rows, cols)][self.ei, self.ej]
        k, e = len(rows), len(self.ei)
        A = np.zeros((2 * k, e))
        A[self.ei, np.arange(e)] = 1
        A[k + self.ej, np.arange(e)] = 1
        self.A = A
        self.N = null_space(A)
        x = _sinkhorn(sub)[self.ei, self.ej]
        # least-norm correction onto the affine hull
        x = x - np.linalg.pinv(A) @ (A @ x - 1)
        self.x = np.clip(x, 1e-12, 1 - 1e-12)
        self.k = k

    def energy(self, x) -> float:
        return float(np.sum(x * np.log(x / self.w)) - np.sum((1 - x) * np.log1p(-x)))

    def grad(self, x) -> np.ndarray:
        return np.log(x) + np.log1p(-x) - np.log(self.w) + 2

    def gap(self, x, g) -> float:
        cost = np.full((self.k, self.k), np.inf)
        cost[self.ei, self.ej] = g
        r, c = linear_sum_assignment(cost)
        return float(g @ x - cost[r, c].sum())

    def newton_step(self, x, g) -> np.ndarray:
        N = self.N
        h = 1 / x - 1 / (1 - x)
        H = N.T @ (h[:, None] * N)
        lam, V = np.linalg.eigh(H)
        # PSD on the polytope up to rounding; flat directions get a small floor
        floor = 1e-10 * max(1.0, float(np.abs(lam).max()))
        lam = np.maximum(np.abs(lam), floor)
        rg = N.T @ g
        d = -N @ (V @ ((V.T @ rg) / lam))
        f0 = self.energy(x)
        slope = float(g @ d)
        if slope >= 0:
            d, slope = -N @ rg, -float(rg @ rg)
        t = 1.0
        neg, pos = d < 0, d > 0
        if neg.any():
            t = min(t, 0.99 * float(np.min(-x[neg] / d[neg])))
        if pos.any():
            t = min(t, 0.99 * float(np.min((1 - x[pos]) / d[pos])))
        while t > 1e-16:
            y = x + t * d
            if self.energy(y) <= f0 + 1e-4 * t * slope:
                return y
            t *= 0.5
        return x


def minimize_bethe(theta, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER, strict: bool = False) -> BetheResult:
    """``perm_B(theta)`` with a certified gap on ``F``.

    ``value = exp(-F(minimizer))``, so the true Bethe permanent lies in
    ``[value, value * exp(gap)]``.  Without a perfect matching the value is 0.
    With ``strict`` a run that misses ``tol`` raises ``NonConvergence``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t = _as_theta(theta)
    n = t.shape[0]
    if n == 0:
        return BetheResult(1.0, t.copy(), 0.0, 0, True, 0.0)
    if not has_perfect_matching(t):
        return BetheResult(0.0, np.zeros_like(t), 0.0, 0, True, math.inf)
    mask = allowed_edges(t)
    graph = np.block([[np.zeros((n, n)), mask], [mask.T, np.zeros((n, n))]])
    ncomp, labels = connected_components(csr_matrix(graph), directed=False)
    gamma = np.zeros_like(t)
    forced_energy = 0.0
    comps = []
    for c in range(ncomp):
        rows = np.flatnonzero(labels[:n] == c)
        cols = np.flatnonzero(labels[n:] == c)
        if len(rows) == 1:
            gamma[rows[0], cols[0]] = 1.0
            forced_energy -= math.log(t[rows[0], cols[0]])
        else:
            comps.append(_Component(t, rows, cols, mask))
    iterations = 0
    share = tol / max(1, len(comps))
    gaps = []
    for comp in comps:
        x = comp.x
        g = comp.grad(x)
        gap = comp.gap(x, g)
        while gap > share and iterations < max_iter:
            y = comp.newton_step(x, g)
            iterations += 1
            if np.array_equal(y, x):
                break
            x = y
            g = comp.grad(x)
            gap = comp.gap(x, g)
        comp.x = x
        gaps.append(max(gap, 0.0))
        gamma[comp.rows[comp.ei], comp.cols[comp.ej]] = x
    energy = forced_energy + sum(c.energy(c.x) for c in comps)
    total_gap = float(sum(gaps))
    result = BetheResult(math.exp(-energy), gamma, total_gap, iterations, total_gap <= tol, energy)
    if strict and not result.converged:
        raise NonConvergence(result)
    return result


def bethe_permanent(theta, tol: float = DEFAULT_TOL) -> float:
    return minimize_bethe(theta, tol, strict=True).value


@dataclass(frozen=True)
class CofactorReport:
    """``lhs = perm_B(T)`` against ``rhs = sum_l T[i,l] perm_B(T minus row i,
    column l)``; ``slack = rhs - lhs``.  ``uncertainty`` bounds how far the
    float slack can sit from the exact one given the certified gaps."""

    lhs: float
    rhs: float
    slack: float
    uncertainty: float
    holds: bool


def bethe_cofactor_inequality(T, i: int, tol: float = DEFAULT_TOL) -> CofactorReport:
    t = _as_theta(T)
    m = t.shape[0]
    if not 1 <= i <= m:
        raise IndexError(f"row index {i} out of range 1..{m}")
    main = minimize_bethe(t, tol, strict=True)
    lhs = main.value
    unc = lhs * math.expm1(main.gap)
    rhs = 0.0
    for l in range(m):
        if t[i - 1, l] == 0:
            continue
        minor = np.delete(np.delete(t, i - 1, axis=0), l, axis=1)
        r = minimize_bethe(minor, tol, strict=True)
        rhs += t[i - 1, l] * r.value
        unc += t[i - 1, l] * r.value * math.expm1(r.gap)
    return CofactorReport(lhs, rhs, rhs - lhs, unc, lhs <= rhs + unc)
