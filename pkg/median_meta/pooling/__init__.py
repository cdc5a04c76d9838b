"""Pooling approaches and the per-approach dispatcher."""

from median_meta.pooling.base import Pooler, PoolingInputs
from median_meta.pooling.dispatch import (
    MeansPooler,
    MedianPooler,
    TransformationPooler,
    apply_approach,
    apply_approach_detailed,
    pooler_for,
    resolve_inputs,
)
from median_meta.pooling.inverse_variance import (
    dl_tau2,
    pool_fixed,
    pool_random,
)
from median_meta.pooling.median import (
    ci_positions,
    pool_median_mm,
    pool_median_wm,
)

__all__ = [
    "MeansPooler",
    "MedianPooler",
    "Pooler",
    "PoolingInputs",
    "TransformationPooler",
    "apply_approach",
    "apply_approach_detailed",
    "ci_positions",
    "dl_tau2",
    "pool_fixed",
    "pool_median_mm",
    "pool_median_wm",
    "pool_random",
    "pooler_for",
    "resolve_inputs",
]
