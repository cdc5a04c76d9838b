"""
Plain and weighted sample quantiles.

sample_quantile is the continuous linear-interpolation definition at
rank h = (n - 1) q + 1 (numpy's "linear" method).

weighted_quantile follows the weighted-quantile routine commonly used for
weighted medians of study medians: weights are normalized to sum to the
number of values k, the rank h = (k - 1) q + 1 is located on the
cumulative weights with a right-continuous step lookup, and the values at
floor(h) and floor(h) + 1 are interpolated by the fractional part of h.
With equal weights the cumulative weights are 1, 2, ..., k and the rule
is exactly sample_quantile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from median_meta.errors import (
    DomainError,
    EmptyInputError,
    InvalidWeightsError,
)

_KNOT_TOLERANCE = 1e-9


def _check_probability(q: float) -> None:
    if not (0.0 <= q <= 1.0):
        raise DomainError(f"quantile level must be in [0, 1], got {q}")


def sample_quantile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile of values at level q."""
    _check_probability(q)
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyInputError("sample_quantile of an empty sample")
    return float(np.quantile(arr, q, method="linear"))


@dataclass(frozen=True)
class WeightedSample:
    """Values with nonnegative weights (normalized on use)."""

    values: Sequence[float]
    weights: Sequence[float]

    def __post_init__(self) -> None:
        if len(self.values) == 0:
            raise EmptyInputError("weighted sample has no values")
        if len(self.values) != len(self.weights):
            raise InvalidWeightsError(
                f"{len(self.values)} values but "
                f"{len(self.weights)} weights"
            )
        w = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidWeightsError(
                "weights must be finite and nonnegative"
            )
        if not np.any(w > 0):
            raise InvalidWeightsError("all weights are zero")

    def sorted_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Values ascending with their weights normalized to sum to 1."""
        x = np.asarray(self.values, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        order = np.argsort(x, kind="stable")
        w = w[order]
        return x[order], w / w.sum()


def _value_at_rank(
    cumulative: np.ndarray, x: np.ndarray, rank: float
) -> float:
    # first value whose cumulative weight reaches the rank
    tol = _KNOT_TOLERANCE * cumulative[-1]
    idx = int(np.searchsorted(cumulative, rank - tol, side="left"))
    return float(x[min(idx, x.size - 1)])


def weighted_quantile(sample: WeightedSample, q: float) -> float:
    """Weighted quantile of the sample at level q."""
    _check_probability(q)
    x, w = sample.sorted_arrays()
    k = x.size
    if k == 1:
        return float(x[0])
    cumulative = np.cumsum(w) * k
    h = (k - 1) * q
    base = math.floor(h)
    frac = h - base
    low = _value_at_rank(cumulative, x, base + 1)
    if frac == 0.0:
        return low
    high = _value_at_rank(cumulative, x, min(base + 2, k))
    return low + (high - low) * frac
