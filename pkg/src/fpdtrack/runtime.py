"""Worker sizing and the ordered parallel map used by the numeric stages."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_configured_threads: int | None = None


def configure_threads(threads: int | None) -> None:
    """Set the process-wide worker cap (None clears it, 0 means auto)."""
    global _configured_threads
    _configured_threads = threads


def resolve_threads(requested: int | None = None) -> int:
    """Resolve the worker count.

    Precedence: explicit argument, FPD_THREADS, configure_threads(), auto.
    Zero or negative values mean one worker per CPU.
    """
    value = requested
    if value is None:
        env = os.getenv("FPD_THREADS")
        if env is not None and env.strip():
            try:
                value = int(env)
            except ValueError:
                value = 0
    if value is None:
        value = _configured_threads
    if not value or value <= 0:
        return os.cpu_count() or 1
    return value


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """Apply fn to every item, returning results in input order."""
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
