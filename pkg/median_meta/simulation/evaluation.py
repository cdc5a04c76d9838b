"""
Per-dataset evaluation: pool the reported studies with each approach and
score the estimate against the generating distribution's truth.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Sequence

from loguru import logger

from median_meta.errors import MedianMetaError
from median_meta.pooling.dispatch import apply_approach
from median_meta.schema import (
    Approach,
    PooledEstimate,
    SkewLevel,
    StudySummary,
    Target,
)
from median_meta.simulation.config import (
    Scenario,
    ScalingStep,
    SimConfig,
)
from median_meta.simulation.generation import TruthPair
from median_meta.simulation.reporting import median_share
from median_meta.stats.skewness import (
    classify_skew,
    mean_bowley_skewness,
)


@dataclass(frozen=True)
class PerformanceRecord:
    """One approach scored on one simulated dataset."""

    approach: Approach
    scenario: Scenario
    scaling_step: ScalingStep
    k_studies: int
    size_median: int
    tau2: float
    sigma2: float
    dataset_index: int
    estimate: float
    truth: float
    pe: float
    ape: float
    sq_err: float
    covered: bool
    ci_low: float
    ci_high: float
    mean_skb: float
    skew_level: SkewLevel
    tau2_hat: float | None = None
    i2: float | None = None
    median_share: float = 0.0

    @classmethod
    def from_estimate(
        cls,
        approach: Approach,
        estimate: PooledEstimate,
        truth: float,
        config: SimConfig,
        *,
        dataset_index: int,
        mean_skb: float,
        median_share: float = 0.0,
    ) -> PerformanceRecord:
        pe = (estimate.point - truth) / truth * 100.0
        return cls(
            approach=approach,
            scenario=config.scenario,
            scaling_step=config.scaling_step,
            k_studies=config.k_studies,
            size_median=config.size_median,
            tau2=config.tau2,
            sigma2=config.sigma2,
            dataset_index=dataset_index,
            estimate=estimate.point,
            truth=truth,
            pe=pe,
            ape=abs(pe),
            sq_err=(estimate.point - truth) ** 2,
            covered=estimate.covers(truth),
            ci_low=estimate.ci_low,
            ci_high=estimate.ci_high,
            mean_skb=mean_skb,
            skew_level=classify_skew(mean_skb),
            tau2_hat=estimate.tau2,
            i2=estimate.i2,
            median_share=median_share,
        )

    def sort_key(self) -> tuple:
        return (
            self.k_studies,
            self.size_median,
            self.tau2,
            self.sigma2,
            self.scaling_step.value,
            self.scenario.value,
            self.dataset_index,
            self.approach.value,
        )

    def to_row(self) -> dict[str, Any]:
        row = asdict(self)
        for key in ("approach", "scenario", "scaling_step", "skew_level"):
            row[key] = row[key].value
        return row


def dataset_skewness(
    studies: Sequence[StudySummary],
) -> float | None:
    """
    Mean Bowley coefficient of the studies' quartiles; None when no study
    has a usable interquartile range.
    """
    triples = [
        (s.quantiles.q1, s.quantiles.median, s.quantiles.q3)
        for s in studies
        if s.has_quartiles
    ]
    mean_skb, used = mean_bowley_skewness(triples)
    if used < len(triples):
        logger.warning(
            "skipped {} studies with zero IQR in skewness",
            len(triples) - used,
        )
    return mean_skb


def evaluate_dataset(
    reported: Sequence[StudySummary],
    truth: TruthPair,
    approaches: Sequence[Approach],
    config: SimConfig,
    *,
    generated: Sequence[StudySummary] | None = None,
    dataset_index: int = 0,
) -> list[PerformanceRecord]:
    """
    Score each approach on one dataset.

    Skewness is taken from the generated (pre-redaction) summaries when
    given, so datasets reported as means can still be binned. A failing
    approach yields no record.
    """
    mean_skb = dataset_skewness(
        generated if generated is not None else reported
    )
    if mean_skb is None:
        logger.warning(
            "{} dataset {}: no usable quartiles, no records",
            config.label,
            dataset_index,
        )
        return []
    share = median_share(reported)
    records = []
    for approach in approaches:
        try:
            estimate = apply_approach(reported, approach)
        except MedianMetaError as exc:
            logger.warning(
                "{} dataset {}: {} failed: {}",
                config.label,
                dataset_index,
                approach.value,
                exc,
            )
            continue
        target_truth = (
            truth.true_median
            if approach.target is Target.MEDIAN
            else truth.true_mean
        )
        records.append(
            PerformanceRecord.from_estimate(
                approach,
                estimate,
                target_truth,
                config,
                dataset_index=dataset_index,
                mean_skb=mean_skb,
                median_share=share,
            )
        )
    return records
