import asyncio
import random
import time
from typing import Callable, List, Optional, Sequence

from app.config import RunConfig
from app.errors import ConfigError
from app.logger import get_logger
from app.models import SuiteResult
from app.suites import SUITES

logger = get_logger(__name__)

# Overall pipeline timeout (10 minutes)
PIPELINE_TIMEOUT_SECONDS = 600


def suite_rng(seed: int, name: str) -> random.Random:
    """Each suite gets its own stream so results do not depend on scheduling."""
    return random.Random(f"{seed}:{name}")


def resolve_suites(names: Optional[Sequence[str]]) -> List[str]:
    """Requested suite names in registry order; all of them when none are requested."""
    if not names:
        return list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    return [n for n in SUITES if n in set(names)]


def run_single_suite(name: str, config: RunConfig) -> SuiteResult:
    """
    Runs one suite and never raises: an exception becomes a failed result
    carrying the error text, so the rest of the batch still reports.
    """
    start = time.perf_counter()
    logger.info("Suite %s start | seed=%d", name, config.seed)
    try:
        result = SUITES[name](config, suite_rng(config.seed, name))
    except Exception as e:
        elapsed = time.perf_counter() - start
        logger.error("Suite %s FAILED | elapsed=%.2fs error=%s", name, elapsed, e, exc_info=True)
        return SuiteResult(name=name, passed=False, error=f"{type(e).__name__}: {e}")
    elapsed = time.perf_counter() - start
    logger.info(
        "Suite %s done  | passed=%s checked=%d violations=%d elapsed=%.2fs",
        name,
        result.passed,
        result.checked,
        len(result.violations),
        elapsed,
    )
    return result


async def run_suites(
    names: Optional[Sequence[str]],
    config: RunConfig,
    max_workers: int = 4,
    on_progress: Optional[Callable[[int, int, SuiteResult], None]] = None,
) -> List[SuiteResult]:
    """
    Run the requested suites concurrently, bounded by a semaphore.

    Args:
        on_progress: Optional callback(completed_count, total, result)
                     called each time a suite finishes.
    Returns:
        One SuiteResult per suite, in registry order whatever the completion order.
    """
    selected = resolve_suites(names)
    total = len(selected)
    semaphore = asyncio.Semaphore(max_workers)
    completed_count = 0
    finished: dict = {}

    pipeline_start = time.perf_counter()
    logger.info("Batch start | suites=%d max_workers=%d", total, max_workers)

    async def _bounded_run(name: str) -> None:
        nonlocal completed_count
        async with semaphore:
            result = await asyncio.to_thread(run_single_suite, name, config)
        finished[name] = result
        completed_count += 1
        if on_progress:
            on_progress(completed_count, total, result)

    try:
        await asyncio.wait_for(
            asyncio.gather(*(_bounded_run(name) for name in selected)),
            timeout=PIPELINE_TIMEOUT_SECONDS,
        )
    except asyncio.TimeoutError:
        elapsed = time.perf_counter() - pipeline_start
        logger.error("Batch TIMEOUT after %.2fs | %d/%d suites completed", elapsed, completed_count, total)

    results = [
        finished[name] if name in finished else SuiteResult(name=name, passed=False, error="timed out")
        for name in selected
    ]
    elapsed = time.perf_counter() - pipeline_start
    logger.info("Batch done | completed=%d/%d elapsed=%.2fs", completed_count, total, elapsed)
    return results
