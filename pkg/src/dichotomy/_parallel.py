"""Thread-pool map capped by the ``DICHOTOMY_THREADS`` environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(default: int | None = None) -> int:
    env = os.environ.get("DICHOTOMY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return default if default is not None else (os.cpu_count() or 1)


def parallel_map(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]``, in input order, on up to ``workers`` threads."""
    items = list(items)
    workers = thread_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
