from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def default_workers() -> int:
    return os.cpu_count() or 1


def split_range(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    """Contiguous, ordered, non-empty pieces of ``[lo, hi)``."""
    parts = max(1, min(parts, hi - lo))
    step, extra = divmod(hi - lo, parts)
    out, start = [], lo
    for k in range(parts):
        end = start + step + (1 if k < extra else 0)
        out.append((start, end))
        start = end
    return out


def map_ordered(fn, arglist, workers: int = 1) -> list:
    """``[fn(*args) for args in arglist]``, optionally in worker processes.
    Results come back in input order whatever the worker count."""
    arglist = list(arglist)
    if workers <= 1 or len(arglist) <= 1:
        return [fn(*args) for args in arglist]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *args) for args in arglist]
        return [f.result() for f in futures]
