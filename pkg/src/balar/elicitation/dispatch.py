"""Bounded-parallel dispatch of independent elicitation calls.

Results come back in input order regardless of completion order; at most
`max_concurrent` calls run at once; if any call fails after its own retries,
the whole batch fails with the earliest failure.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def dispatch_parallel(
    calls: Sequence[Callable[[], T]], max_concurrent: int = 8
) -> list[T]:
    if not calls:
        return []
    if max_concurrent < 1:
        raise ValueError("max_concurrent must be at least 1")
    if len(calls) == 1 or max_concurrent == 1:
        return [call() for call in calls]
    results: list[T | None] = [None] * len(calls)
    errors: dict[int, BaseException] = {}
    with ThreadPoolExecutor(max_workers=max_concurrent) as pool:
        futures = [pool.submit(call) for call in calls]
        for i, future in enumerate(futures):
            try:
                results[i] = future.result()
            except BaseException as exc:  # noqa: BLE001 - collected, first re-raised
                errors[i] = exc
    if errors:
        raise errors[min(errors)]
    return results  # type: ignore[return-value]
