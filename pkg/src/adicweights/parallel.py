"""Deterministic, order-preserving parallel mapping.

All computations in this package are pure functions of their arguments, so
the only way parallelism could change results is by reordering.  The
mapper here always returns results in input order and chunks work
statically, which makes every output byte independent of the worker
count.  Worker processes are used (not threads) because the workloads are
CPU-bound exact arithmetic.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

from .errors import DomainError

__all__ = ["DeterministicMapper", "make_mapper"]


class DeterministicMapper:
    """Callable ``mapper(func, items) -> list`` preserving input order.

    With ``workers <= 1`` it degenerates to the builtin map.  The pool is
    created lazily and reused across calls; use as a context manager or
    call ``close()`` to release it.
    """

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise DomainError(f"worker count must be >= 1, got {workers}")
        self.workers = workers
        self._pool: ProcessPoolExecutor | None = None

    def __call__(self, func, items) -> list:
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            return [func(item) for item in items]
        if self._pool is None:
            self._pool = ProcessPoolExecutor(max_workers=self.workers)
        chunk = max(1, len(items) // (4 * self.workers))
        return list(self._pool.map(func, items, chunksize=chunk))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def make_mapper(workers: int | None) -> DeterministicMapper:
    return DeterministicMapper(1 if workers is None else workers)
