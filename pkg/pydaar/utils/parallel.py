"""Thread pool helpers with order-preserving results."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar
import logging
import os

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def available_threads() -> int:
    """Default worker count: the CPUs available to this process."""
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None or threads <= 0:
        return available_threads()
    return int(threads)


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = 1) -> List[R]:
    """
    Apply ``func`` to every item, in parallel when threads > 1.

    Results come back in input order, so any reduction over them is
    independent of scheduling.
    """
    items = list(items)
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
