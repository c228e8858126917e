"""Order-preserving process-pool map that pins BLAS to one thread."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from threadpoolctl import threadpool_limits


def default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _init_worker():
    threadpool_limits(1)


def pmap(fn, items, jobs: int = 1, chunksize: int | None = None):
    items = list(items)
    if chunksize is None:
        chunksize = max(1, len(items) // (4 * max(1, jobs or 1)))
    if jobs is None or jobs <= 1 or len(items) <= 1:
        with threadpool_limits(1):
            return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
