"""
Bowley's quartile coefficient of skewness and the four-level skew
classification used to bin simulation results.
"""

from __future__ import annotations

import math
from typing import Iterable

from median_meta.errors import DegenerateSpreadError, DomainError
from median_meta.schema import SkewLevel

# upper bin edges, inclusive
LOW_MAX = 0.1
MEDIUM_MAX = 0.2
HIGH_MAX = 0.4


def bowley_skewness(q1: float, q2: float, q3: float) -> float:
    """(Q1 - 2 Q2 + Q3) / (Q3 - Q1), in [-1, 1]."""
    if not (q1 <= q2 <= q3):
        raise DomainError(
            f"quartiles out of order: q1={q1}, q2={q2}, q3={q3}"
        )
    if q3 == q1:
        raise DegenerateSpreadError(
            "Bowley skewness undefined for a zero IQR"
        )
    return (q1 - 2.0 * q2 + q3) / (q3 - q1)


def classify_skew(skb: float) -> SkewLevel:
    if math.isnan(skb):
        raise DomainError("cannot classify a NaN skewness")
    if skb <= LOW_MAX:
        return SkewLevel.LOW
    if skb <= MEDIUM_MAX:
        return SkewLevel.MEDIUM
    if skb <= HIGH_MAX:
        return SkewLevel.HIGH
    return SkewLevel.VERY_HIGH


def mean_bowley_skewness(
    quartiles: Iterable[tuple[float, float, float]],
) -> tuple[float | None, int]:
    """
    Mean Bowley coefficient over (q1, q2, q3) triples, skipping triples
    with a zero IQR.

    Returns:
        (mean, number of triples used); mean is None when none was usable.
    """
    total = 0.0
    used = 0
    for q1, q2, q3 in quartiles:
        try:
            total += bowley_skewness(q1, q2, q3)
        except DegenerateSpreadError:
            continue
        used += 1
    if used == 0:
        return None, 0
    return total / used, used
