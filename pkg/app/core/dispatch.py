"""
Batch dispatch of per-image Celery tasks.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterable, List

from celery import group
from django.conf import settings

logger = logging.getLogger(__name__)


def run_batch(task, payloads: Iterable[Dict[str, Any]], jobs: int = 1) -> List[Dict[str, Any]]:
    """
    Run a task over a batch of JSON payloads and collect results in payload order.

    Without a broker (eager mode) the batch runs in-process on at most ``jobs``
    threads; with a broker it is sent to the workers as a Celery group.

    Args:
        task: Celery task taking a single payload dict
        payloads: JSON-serialisable payloads
        jobs: Upper bound on concurrently running payloads in eager mode

    Returns:
        Task results, one per payload, in submission order
    """
    payloads = list(payloads)
    if not payloads:
        return []

    if settings.CELERY_TASK_ALWAYS_EAGER:
        logger.debug(f"Running {len(payloads)} {task.name} payloads in-process with {jobs} jobs")

        def _apply(payload):
            return task.apply(args=[payload]).get()

        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            return list(pool.map(_apply, payloads))

    logger.info(f"Dispatching {len(payloads)} {task.name} payloads to workers")
    return group(task.s(payload) for payload in payloads).apply_async().get()
