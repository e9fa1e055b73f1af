"""Order-preserving fan-out used by the sharded enumerations and searches."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """``list(map(fn, items))``, optionally across worker processes.

    Results come back in input order whatever the worker count, so callers
    that merge them deterministically get identical output for any ``workers``.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))


def chunk_ranges(total: int, parts: int) -> list[range]:
    """Split ``range(total)`` into at most ``parts`` contiguous pieces."""
    parts = max(1, min(parts, total)) if total else 1
    step, extra = divmod(total, parts)
    out, start = [], 0
    for k in range(parts):
        stop = start + step + (1 if k < extra else 0)
        out.append(range(start, stop))
        start = stop
    return out
