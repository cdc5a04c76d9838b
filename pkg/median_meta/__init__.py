"""
median-meta: pool meta-analyses of medians (median of medians, weighted
median of medians) alongside transformation-based mean pooling, and run
the simulation study that compares them.
"""

__version__ = "0.1.0"

from median_meta.estimators import (  # noqa: E402
    summarize_sample,
    t1_estimate,
    t2_estimate,
)
from median_meta.pooling import (  # noqa: E402
    apply_approach,
    dl_tau2,
    pool_fixed,
    pool_median_mm,
    pool_median_wm,
    pool_random,
)
from median_meta.schema import (  # noqa: E402
    Approach,
    PooledEstimate,
    QuantileSummary,
    StudySummary,
)

__all__ = [
    "Approach",
    "PooledEstimate",
    "QuantileSummary",
    "StudySummary",
    "__version__",
    "apply_approach",
    "dl_tau2",
    "pool_fixed",
    "pool_median_mm",
    "pool_median_wm",
    "pool_random",
    "summarize_sample",
    "t1_estimate",
    "t2_estimate",
]
