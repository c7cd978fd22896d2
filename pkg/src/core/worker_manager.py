"""Worker manager for concurrent per-address work using a thread pool."""
import logging
import threading
from concurrent.futures import Future, ThreadPoolExecutor, wait as wait_all
from typing import Callable, Dict, Iterable, List, Optional, TypeVar

from config import settings


logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerManager:
    """
    Runs per-item jobs (address fetches) on a bounded thread pool.

    Results come back in submission order whatever the scheduling, so callers
    merging them at a barrier stay deterministic.
    """

    def __init__(self, max_workers: Optional[int] = None):
        """
        Initialize the worker manager.

        Args:
            max_workers: Maximum number of worker threads (default from settings)
        """
        self.max_workers = max_workers or settings.parallelism
        self.executor = ThreadPoolExecutor(max_workers=self.max_workers, thread_name_prefix="fetch")
        self.active: Dict[int, Future] = {}
        self._lock = threading.Lock()
        self._shutdown = False

        logger.debug(f"WorkerManager initialized with {self.max_workers} workers")

    def submit(self, fn: Callable[..., R], *args) -> Future:
        """Submit one job; the future is tracked until it finishes."""
        if self._shutdown:
            raise RuntimeError("WorkerManager is shut down")
        future = self.executor.submit(fn, *args)
        with self._lock:
            self.active[id(future)] = future
        future.add_done_callback(self._forget)
        return future

    def _forget(self, future: Future) -> None:
        with self._lock:
            self.active.pop(id(future), None)

    def map_ordered(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """
        Apply `fn` to every item concurrently and return results in item order.

        Every job runs to completion; if any raised, the exception of the
        earliest failing item is re-raised afterwards.
        """
        futures = [self.submit(fn, item) for item in items]
        wait_all(futures)
        for future in futures:
            error = future.exception()
            if error is not None:
                raise error
        return [f.result() for f in futures]

    def get_active_count(self) -> int:
        """Get the number of jobs not yet finished."""
        with self._lock:
            return len(self.active)

    def shutdown(self, wait: bool = True):
        """
        Shutdown the worker manager.

        Args:
            wait: Whether to wait for jobs to complete
        """
        logger.debug("Shutting down WorkerManager")
        self._shutdown = True
        self.executor.shutdown(wait=wait)

    def __enter__(self):
        """Context manager entry."""
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Context manager exit."""
        self.shutdown()
