"""Small shared helpers: bounded thread pool for per-frame work."""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "SEQRECON_THREADS"


def thread_count() -> int:
    """Worker cap: SEQRECON_THREADS if set, else the CPU count, at least 1."""
    raw = os.environ.get(THREADS_ENV)
    if raw is not None:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return max(1, os.cpu_count() or 1)


def pmap(fn, items):
    """Map preserving order, threaded when it can help.

    Frames are independent and the FFT work releases the GIL, so a small
    thread pool speeds up per-frame stages without changing results.
    """
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
