"""
Mean/SD estimators for studies that report a median with quartiles (T1)
or with a range (T2), and the compression of a raw sample into the
StudySummary a study would report.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from median_meta.errors import (
    DegenerateSpreadError,
    DomainError,
    IneligibleStudyError,
)
from median_meta.schema import (
    EstimateSource,
    MeanSdEstimate,
    QuantileSummary,
    StudySummary,
)
from median_meta.stats.distributions import std_normal_quantile
from median_meta.stats.quantiles import sample_quantile


def _check_n(n: int) -> None:
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")


def t1_phi_argument(n: int) -> float:
    """Probability whose normal quantile scales the IQR for size n."""
    return (0.75 * n - 0.125) / (n + 0.25)


def t2_phi_argument(n: int) -> float:
    """Probability whose normal quantile scales the range for size n."""
    return (n - 0.375) / (n + 0.25)


def t1_estimate(
    n: int, q1: float, q2: float, q3: float
) -> MeanSdEstimate:
    """Mean and SD from the median and quartiles."""
    _check_n(n)
    if not (q1 <= q2 <= q3):
        raise DomainError(
            f"quartiles out of order: q1={q1}, q2={q2}, q3={q3}"
        )
    if q1 == q3:
        raise DegenerateSpreadError("zero interquartile range")
    mean = (q1 + q2 + q3) / 3.0
    sd = (q3 - q1) / (2.0 * std_normal_quantile(t1_phi_argument(n)))
    return MeanSdEstimate(
        mean=mean,
        sd=sd,
        se=sd / math.sqrt(n),
        source=EstimateSource.T1,
    )


def t2_estimate(
    n: int, minimum: float, q2: float, maximum: float
) -> MeanSdEstimate:
    """Mean and SD from the median and range (no 1/(4n) term)."""
    _check_n(n)
    if not (minimum <= q2 <= maximum):
        raise DomainError(
            f"range out of order: min={minimum}, median={q2}, "
            f"max={maximum}"
        )
    if minimum == maximum:
        raise DegenerateSpreadError("zero range")
    mean = (minimum + 2.0 * q2 + maximum) / 4.0
    sd = (maximum - minimum) / (
        2.0 * std_normal_quantile(t2_phi_argument(n))
    )
    return MeanSdEstimate(
        mean=mean,
        sd=sd,
        se=sd / math.sqrt(n),
        source=EstimateSource.T2,
    )


def summarize_sample(raw: Sequence[float], id: str) -> StudySummary:
    """
    Everything a study reports about its sample: n, mean, se (n-1
    variance) and the five-number summary.
    """
    x = np.asarray(raw, dtype=float)
    if x.size < 2:
        raise DomainError(
            f"summarize_sample needs n >= 2, got {x.size}"
        )
    sd = float(np.std(x, ddof=1))
    quantiles = QuantileSummary(
        min=float(x.min()),
        q1=sample_quantile(x, 0.25),
        median=sample_quantile(x, 0.5),
        q3=sample_quantile(x, 0.75),
        max=float(x.max()),
    )
    return StudySummary(
        id=id,
        n=int(x.size),
        mean=float(x.mean()),
        se=sd / math.sqrt(x.size) if sd > 0 else None,
        quantiles=quantiles,
    )


def estimate_mean_sd(
    study: StudySummary,
    preference: EstimateSource = EstimateSource.T1,
) -> MeanSdEstimate:
    """
    Mean and standard error a transformation approach uses for one study.

    A reported mean+se passes through. Otherwise the preferred
    estimator runs when its spread is available (T1 wins over T2 when
    both are and T1 is preferred) and the other estimator is the
    fallback.

    Raises:
        IneligibleStudyError: no n, no usable spread, or only
            degenerate spreads.
    """
    if study.has_mean_se:
        assert study.mean is not None and study.se is not None
        sd = study.se * math.sqrt(study.n) if study.n else None
        return MeanSdEstimate(
            mean=study.mean,
            sd=sd,
            se=study.se,
            source=EstimateSource.REPORTED,
        )
    q = study.quantiles
    if q is None:
        raise IneligibleStudyError(
            f"study {study.id!r} reports no median", [study.id]
        )
    if study.n is None:
        raise IneligibleStudyError(
            f"study {study.id!r} reports a median without n",
            [study.id],
        )
    if preference is EstimateSource.T2:
        order = (EstimateSource.T2, EstimateSource.T1)
    else:
        order = (EstimateSource.T1, EstimateSource.T2)
    reasons: list[str] = []
    for source in order:
        try:
            if source is EstimateSource.T1 and q.has_quartiles:
                return t1_estimate(study.n, q.q1, q.median, q.q3)
            if source is EstimateSource.T2 and q.has_range:
                return t2_estimate(study.n, q.min, q.median, q.max)
        except (DegenerateSpreadError, DomainError) as exc:
            reasons.append(str(exc))
    detail = "; ".join(reasons) if reasons else "no quartiles or range"
    raise IneligibleStudyError(
        f"study {study.id!r} has no usable spread ({detail})",
        [study.id],
    )
