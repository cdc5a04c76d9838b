"""
Grid runner: simulate every replicate of every SimConfig, then
aggregate.

The unit of work is one SimConfig with all of its replicates. With one
worker configs run in-process; with more they are fanned out to worker
processes through anyio, bounded by a capacity limiter. Each replicate
draws from its own seeded streams, so results do not depend on worker
count or grid order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import anyio
import anyio.to_process
from loguru import logger

from median_meta.errors import EmptyInputError
from median_meta.simulation.aggregation import (
    AggregateCell,
    aggregate,
)
from median_meta.simulation.config import SimConfig, approaches_for
from median_meta.simulation.evaluation import (
    PerformanceRecord,
    evaluate_dataset,
)
from median_meta.simulation.generation import (
    generate_dataset,
    true_values,
)
from median_meta.simulation.reporting import assign_reporting
from median_meta.stats.normality import DEFAULT_ALPHA


@dataclass
class GridResult:
    cells: list[AggregateCell]
    records: list[PerformanceRecord]
    n_configs: int
    elapsed_seconds: float = 0.0
    dropped: int = field(default=0)


def run_config(
    config: SimConfig, alpha: float = DEFAULT_ALPHA
) -> list[PerformanceRecord]:
    """All replicates of one config."""
    truth = true_values(config.scaling_step, config.tau2, config.sigma2)
    approaches = approaches_for(config)
    records: list[PerformanceRecord] = []
    for r in range(config.replications):
        dataset = generate_dataset(config, config.data_rng(r))
        reported = assign_reporting(
            dataset, config.scenario, config.reporting_rng(r), alpha
        )
        records.extend(
            evaluate_dataset(
                reported,
                truth,
                approaches,
                config,
                generated=dataset.summaries,
                dataset_index=r,
            )
        )
    logger.debug("{}: {} records", config.label, len(records))
    return records


async def run_grid_async(
    grid: Sequence[SimConfig],
    *,
    workers: int = 1,
    alpha: float = DEFAULT_ALPHA,
    on_config_done: Optional[Callable[[SimConfig, int], None]] = None,
) -> GridResult:
    """
    Run every config and aggregate the records.

    on_config_done(config, n_records) is called as each config finishes.
    """
    if not grid:
        raise EmptyInputError("empty simulation grid")
    started = time.perf_counter()
    logger.info(
        "simulating {} configs ({} replicates each at most) on {} "
        "worker(s)",
        len(grid),
        max(c.replications for c in grid),
        workers,
    )
    results: list[list[PerformanceRecord]] = [[] for _ in grid]

    async def _one(i: int, config: SimConfig, limiter) -> None:
        if limiter is None:
            records = run_config(config, alpha)
        else:
            records = await anyio.to_process.run_sync(
                run_config, config, alpha, limiter=limiter
            )
        results[i] = records
        if on_config_done:
            on_config_done(config, len(records))

    if workers <= 1:
        for i, config in enumerate(grid):
            await _one(i, config, None)
            # let the event loop breathe between configs
            await anyio.sleep(0)
    else:
        limiter = anyio.CapacityLimiter(workers)
        async with anyio.create_task_group() as tg:
            for i, config in enumerate(grid):
                tg.start_soon(_one, i, config, limiter)

    records = sorted(
        (r for batch in results for r in batch),
        key=PerformanceRecord.sort_key,
    )
    expected = sum(
        c.replications * len(approaches_for(c)) for c in grid
    )
    dropped = expected - len(records)
    if dropped:
        logger.warning(
            "{} approach evaluations produced no record", dropped
        )
    cells = aggregate(records)
    elapsed = time.perf_counter() - started
    logger.info(
        "simulation finished: {} records, {} cells in {:.1f}s",
        len(records),
        len(cells),
        elapsed,
    )
    return GridResult(
        cells=cells,
        records=records,
        n_configs=len(grid),
        elapsed_seconds=elapsed,
        dropped=dropped,
    )


def run_grid(
    grid: Sequence[SimConfig],
    *,
    workers: int = 1,
    alpha: float = DEFAULT_ALPHA,
    on_config_done: Optional[Callable[[SimConfig, int], None]] = None,
) -> GridResult:
    """Synchronous wrapper around run_grid_async."""

    async def _main() -> GridResult:
        return await run_grid_async(
            grid,
            workers=workers,
            alpha=alpha,
            on_config_done=on_config_done,
        )

    return anyio.run(_main)
