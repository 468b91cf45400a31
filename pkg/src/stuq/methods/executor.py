"""Executor for independent replicate jobs."""

from __future__ import annotations

import asyncio
import logging
from typing import Callable, Sequence, TypeVar

from stuq.core.errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")


class ReplicateExecutor:
    """Runs replicate jobs, potentially in parallel, and returns results by index.

    Each job gets its own thread; tapes are thread-confined so jobs share no
    mutable state. ``workers=1`` runs jobs inline in index order.
    """

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise ConfigError(f"workers must be >= 1, got {workers}")
        self.workers = workers

    def map(self, job: Callable[[int], T], indices: Sequence[int], label: str = "replicate") -> list[T]:
        """Run ``job(i)`` for every index; result order follows ``indices``."""
        indices = list(indices)
        if self.workers == 1 or len(indices) <= 1:
            results = []
            for i in indices:
                results.append(job(i))
                logger.debug(f"{label} {i} finished")
            return results
        return asyncio.run(self._gather(job, indices, label))

    async def _gather(self, job: Callable[[int], T], indices: list[int], label: str) -> list[T]:
        semaphore = asyncio.Semaphore(self.workers)

        async def run_one(i: int) -> T:
            async with semaphore:
                result = await asyncio.to_thread(job, i)
                logger.debug(f"{label} {i} finished")
                return result

        return list(await asyncio.gather(*(run_one(i) for i in indices)))
