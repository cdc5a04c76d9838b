"""
Reporting scenarios: redact each generated study down to what it would
have published.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from median_meta.schema import QuantileSummary, StudySummary
from median_meta.simulation.config import Scenario
from median_meta.simulation.generation import (
    GeneratedDataset,
    GeneratedStudy,
)
from median_meta.stats.normality import DEFAULT_ALPHA, looks_normal


def _quartile_report(study: StudySummary) -> StudySummary:
    q = study.quantiles
    return StudySummary(
        id=study.id,
        n=study.n,
        quantiles=QuantileSummary(q1=q.q1, median=q.median, q3=q.q3),
    )


def _range_report(study: StudySummary) -> StudySummary:
    q = study.quantiles
    return StudySummary(
        id=study.id,
        n=study.n,
        quantiles=QuantileSummary(
            min=q.min, median=q.median, max=q.max
        ),
    )


def _means_report(study: StudySummary) -> StudySummary:
    return StudySummary(
        id=study.id, n=study.n, mean=study.mean, se=study.se
    )


def _mixed_report(
    studies: Sequence[GeneratedStudy],
    rng: np.random.Generator,
    alpha: float,
) -> list[StudySummary]:
    # one coin per study whatever it reports, so the stream stays aligned
    use_quartiles = rng.random(len(studies)) < 0.5
    out = []
    for study, quartiles in zip(studies, use_quartiles):
        if looks_normal(study.raw, alpha):
            out.append(_means_report(study.summary))
        elif quartiles:
            out.append(_quartile_report(study.summary))
        else:
            out.append(_range_report(study.summary))
    return out


def assign_reporting(
    dataset: GeneratedDataset,
    scenario: Scenario,
    rng: np.random.Generator,
    alpha: float = DEFAULT_ALPHA,
) -> list[StudySummary]:
    """Study summaries as reported under the scenario."""
    if scenario is Scenario.ALL_MEDIANS_Q1Q3:
        return [_quartile_report(s.summary) for s in dataset.studies]
    if scenario is Scenario.ALL_MEDIANS_MINMAX:
        return [_range_report(s.summary) for s in dataset.studies]
    if scenario is Scenario.ALL_MEANS:
        return [_means_report(s.summary) for s in dataset.studies]
    return _mixed_report(dataset.studies, rng, alpha)


def median_share(reported: Sequence[StudySummary]) -> float:
    """Fraction of studies that reported a median."""
    if not reported:
        return 0.0
    return sum(1 for s in reported if s.median is not None) / len(
        reported
    )
