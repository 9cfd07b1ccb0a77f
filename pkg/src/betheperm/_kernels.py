"""int64 Gray-code Ryser kernels.

Callers must prove the int64 bound holds before dispatching here; the
big-integer paths in ``permanent`` and ``lifting`` are the general fallback.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _tz(k):
    j = 0
    while (k & 1) == 0:
        k >>= 1
        j += 1
    return j


@njit(cache=True)
def ryser_range(a, lo, hi):
    """Signed Ryser terms for Gray-code positions ``lo <= k < hi``."""
    n = a.shape[0]
    rs = np.zeros(n, np.int64)
    g = lo ^ (lo >> 1)
    bits = 0
    for j in range(n):
        if (g >> j) & 1:
            bits += 1
            for i in range(n):
                rs[i] += a[i, j]
    total = 0
    for k in range(lo, hi):
        if k > lo:
            j = _tz(k)
            g ^= 1 << j
            if (g >> j) & 1:
                bits += 1
                for i in range(n):
                    rs[i] += a[i, j]
            else:
                bits -= 1
                for i in range(n):
                    rs[i] -= a[i, j]
        if bits == 0:
            continue
        p = 1
        for i in range(n):
            p *= rs[i]
            if p == 0:
                break
        if (n - bits) & 1:
            total -= p
        else:
            total += p
    return total


@njit(cache=True)
def lift_sum_range(size, M, fixed_r, fixed_c, free_r, free_c, perms, lo, hi):
    """Sum of permanents over ranks ``lo <= r < hi`` of the free-cell
    assignments.  Cells are block positions in a ``size x size`` block grid;
    fixed cells hold the identity, free cells take ``perms[digit]``.  Cells
    may repeat, in which case blocks add.  The last free cell is the fastest
    digit."""
    N = size * M
    base = np.zeros((N, N), np.int64)
    for c in range(fixed_r.shape[0]):
        for x in range(M):
            base[fixed_r[c] * M + x, fixed_c[c] * M + x] += 1
    F = free_r.shape[0]
    nperm = perms.shape[0]
    digits = np.zeros(F, np.int64)
    rem = lo
    for c in range(F - 1, -1, -1):
        digits[c] = rem % nperm
        rem //= nperm
    full = 1 << N
    a = np.empty((N, N), np.int64)
    total = 0
    for _ in range(lo, hi):
        a[:, :] = base
        for c in range(F):
            p = perms[digits[c]]
            for x in range(M):
                a[free_r[c] * M + x, free_c[c] * M + p[x]] += 1
        total += ryser_range(a, 0, full)
        c = F - 1
        while c >= 0:
            digits[c] += 1
            if digits[c] < nperm:
                break
            digits[c] = 0
            c -= 1
    return total
