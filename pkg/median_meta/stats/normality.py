"""
Shapiro-Wilk normality test (Royston's AS R94 extension, valid for
3 <= n <= 5000) via scipy.stats.shapiro.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from median_meta.errors import DegenerateSpreadError, DomainError

DEFAULT_ALPHA = 0.05
MIN_N = 3
MAX_N = 5000


class ShapiroWilkResult(NamedTuple):
    w_statistic: float
    p_value: float


def shapiro_wilk(sample: Sequence[float]) -> ShapiroWilkResult:
    """W statistic and p-value of the Shapiro-Wilk test."""
    x = np.asarray(sample, dtype=float)
    if not (MIN_N <= x.size <= MAX_N):
        raise DomainError(
            f"Shapiro-Wilk needs {MIN_N} <= n <= {MAX_N}, got {x.size}"
        )
    if np.ptp(x) == 0.0:
        raise DegenerateSpreadError(
            "Shapiro-Wilk undefined for a constant sample"
        )
    result = stats.shapiro(x)
    return ShapiroWilkResult(
        w_statistic=float(result.statistic),
        p_value=float(result.pvalue),
    )


def looks_normal(
    sample: Sequence[float], alpha: float = DEFAULT_ALPHA
) -> bool:
    """True when the test does not reject normality at level alpha."""
    return shapiro_wilk(sample).p_value > alpha
