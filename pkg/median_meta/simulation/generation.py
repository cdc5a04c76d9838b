"""
Data generation: study sizes, scaling constant, true values and
log-normal outcomes with a per-study random effect on the log scale.

Outcome_ij = m * exp(M_i + sigma * Z_ij), M_i ~ Normal(0, tau2),
Z_ij ~ Normal(0, 1). Marginally log(Outcome / m) ~ Normal(0, tau2 +
sigma2), so m is the marginal median and m * exp((tau2 + sigma2) / 2)
the marginal mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field

from median_meta.errors import DomainError
from median_meta.estimators import summarize_sample
from median_meta.schema import StudySummary
from median_meta.simulation.config import ScalingStep, SimConfig

TARGET_VALUE = 5.0
MIN_STUDY_SIZE = 25
# truncation upper bound by median study size
MAX_STUDY_SIZE = {50: 100, 100: 500}


class TruthPair(BaseModel):
    true_mean: float = Field(gt=0)
    true_median: float = Field(gt=0)

    model_config = {"extra": "forbid", "frozen": True}


@dataclass(frozen=True)
class GeneratedStudy:
    raw: np.ndarray
    summary: StudySummary
    random_effect: float


@dataclass(frozen=True)
class GeneratedDataset:
    studies: list[GeneratedStudy]
    m_scale: float
    config: SimConfig

    @property
    def summaries(self) -> list[StudySummary]:
        return [s.summary for s in self.studies]


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def draw_study_size(size_median: int, rng: np.random.Generator) -> int:
    """Log-normal study size, rejection-truncated to its window."""
    if size_median not in MAX_STUDY_SIZE:
        raise DomainError(
            f"size_median must be one of {sorted(MAX_STUDY_SIZE)}, "
            f"got {size_median}"
        )
    upper = MAX_STUDY_SIZE[size_median]
    log_median = math.log(size_median)
    while True:
        n = _round_half_up(math.exp(rng.normal(log_median, 1.0)))
        if MIN_STUDY_SIZE <= n <= upper:
            return n


def compute_scale_m(
    step: ScalingStep, tau2: float, sigma2: float
) -> float:
    """Scale m making the step's marginal target equal to 5."""
    if step is ScalingStep.MEDIAN_IS_5:
        return TARGET_VALUE
    return TARGET_VALUE * math.exp(-(tau2 + sigma2) / 2.0)


def true_values(
    step: ScalingStep, tau2: float, sigma2: float
) -> TruthPair:
    m = compute_scale_m(step, tau2, sigma2)
    return TruthPair(
        true_mean=m * math.exp((tau2 + sigma2) / 2.0),
        true_median=m,
    )


def draw_outcomes(
    m: float,
    tau2: float,
    sigma2: float,
    sizes: Sequence[int],
    rng: np.random.Generator,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """
    Random effects (one per study) and the outcome samples they drive.

    All normals are drawn in one block so the draws depend only on the
    sizes, never on m; both scaling steps see proportional data.
    """
    if tau2 < 0 or sigma2 < 0:
        raise DomainError("variances must be nonnegative")
    effects = rng.normal(0.0, math.sqrt(tau2), size=len(sizes))
    z = rng.standard_normal(int(sum(sizes)))
    splits = np.cumsum(sizes)[:-1]
    samples = [
        m * np.exp(effect + math.sqrt(sigma2) * chunk)
        for effect, chunk in zip(effects, np.split(z, splits))
    ]
    return effects, samples


def generate_dataset(
    config: SimConfig, rng: np.random.Generator
) -> GeneratedDataset:
    """One meta-analysis of config.k_studies simulated studies."""
    sizes = [
        draw_study_size(config.size_median, rng)
        for _ in range(config.k_studies)
    ]
    m = compute_scale_m(config.scaling_step, config.tau2, config.sigma2)
    effects, samples = draw_outcomes(
        m, config.tau2, config.sigma2, sizes, rng
    )
    studies = [
        GeneratedStudy(
            raw=raw,
            summary=summarize_sample(raw, id=f"s{i + 1:02d}"),
            random_effect=float(effect),
        )
        for i, (effect, raw) in enumerate(zip(effects, samples))
    ]
    return GeneratedDataset(studies=studies, m_scale=m, config=config)
