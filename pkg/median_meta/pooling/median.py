"""
Median-of-medians (MM) and weighted median-of-medians (WM) pooling with
quantile-based confidence intervals.
"""

from __future__ import annotations

import math
from typing import Sequence

from median_meta.errors import EmptyInputError, InvalidWeightsError
from median_meta.schema import PooledEstimate, Target
from median_meta.stats.distributions import Z_975
from median_meta.stats.quantiles import (
    WeightedSample,
    sample_quantile,
    weighted_quantile,
)


def ci_positions(k: int) -> tuple[float, float]:
    """Quantile levels of the CI limits; each side clamps at 0 or 1."""
    half = min(0.5, Z_975 / (2.0 * math.sqrt(k)))
    return max(0.0, 0.5 - half), min(1.0, 0.5 + half)


def pool_median_mm(medians: Sequence[float]) -> PooledEstimate:
    values = list(medians)
    if not values:
        raise EmptyInputError("no medians to pool")
    lo, hi = ci_positions(len(values))
    return PooledEstimate(
        target=Target.MEDIAN,
        point=sample_quantile(values, 0.5),
        ci_low=sample_quantile(values, lo),
        ci_high=sample_quantile(values, hi),
        k=len(values),
    )


def pool_median_wm(
    medians: Sequence[float], sizes: Sequence[float]
) -> PooledEstimate:
    """Median of study medians weighted by the number of subjects."""
    values = list(medians)
    if not values:
        raise EmptyInputError("no medians to pool")
    if any(s < 1 for s in sizes):
        raise InvalidWeightsError("study sizes must be >= 1")
    sample = WeightedSample(values=values, weights=list(sizes))
    lo, hi = ci_positions(len(values))
    return PooledEstimate(
        target=Target.MEDIAN,
        point=weighted_quantile(sample, 0.5),
        ci_low=weighted_quantile(sample, lo),
        ci_high=weighted_quantile(sample, hi),
        k=len(values),
    )
