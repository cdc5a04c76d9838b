"""
Run reports for pooling real study tables: per-approach estimates with
the studies that entered them, the skewness check, heterogeneity, forest
rows and provenance. Saved and loaded as JSON.
"""

from __future__ import annotations

import hashlib
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Sequence

from loguru import logger
from pydantic import BaseModel, Field

from median_meta import __version__
from median_meta.errors import (
    IneligibleStudyError,
    NoEligibleStudiesError,
)
from median_meta.estimators import estimate_mean_sd
from median_meta.pooling.dispatch import (
    apply_approach_detailed,
    pooler_for,
)
from median_meta.schema import (
    Approach,
    PooledEstimate,
    SkewLevel,
    SpreadType,
    StudySummary,
)
from median_meta.stats.skewness import (
    LOW_MAX,
    classify_skew,
    mean_bowley_skewness,
)

MEDIAN_RECOMMENDATION = (
    "skewed outcomes (mean Bowley > 0.1): prefer the median-based "
    "approaches (MM, WM)"
)
NEUTRAL_RECOMMENDATION = (
    "little skew (mean Bowley <= 0.1): all approaches are expected to "
    "perform similarly"
)


class Subgroup(str, Enum):
    ALL = "all"
    Q1Q3 = "q1q3"
    MINMAX = "minmax"

    def admits(self, study: StudySummary) -> bool:
        if self is Subgroup.Q1Q3:
            return study.has_quartiles
        if self is Subgroup.MINMAX:
            return study.has_range and not study.has_quartiles
        return True


class Heterogeneity(BaseModel):
    q_stat: float
    q_pvalue: float | None = None
    tau2: float | None = None
    i2: float

    model_config = {"extra": "forbid"}


class ApproachResult(BaseModel):
    approach: Approach
    family: str
    estimate: PooledEstimate
    included_ids: list[str]
    excluded: dict[str, str] = Field(default_factory=dict)
    heterogeneity: Heterogeneity | None = None

    model_config = {"extra": "forbid"}

    @property
    def k(self) -> int:
        return self.estimate.k


class SkewReport(BaseModel):
    mean_skb: float | None
    skew_level: SkewLevel | None
    n_studies: int
    recommendation: str

    model_config = {"extra": "forbid"}


class ForestRow(BaseModel):
    """One input study as a forest plot shows it."""

    id: str
    n: int | None
    point: float
    median: float | None
    spread_type: SpreadType
    spread_low: float | None = None
    spread_high: float | None = None
    est_mean: float | None = None
    est_sd: float | None = None
    included: bool
    reason: str | None = None

    model_config = {"extra": "forbid"}


class Provenance(BaseModel):
    input_digest: str
    source: str | None = None
    seed: int | None = None
    tool_version: str = __version__
    created_utc: str
    subgroup: Subgroup = Subgroup.ALL
    exclude: list[str] = Field(default_factory=list)

    model_config = {"extra": "forbid"}


class RunReport(BaseModel):
    results: list[ApproachResult]
    skew: SkewReport
    studies: list[ForestRow]
    provenance: Provenance

    model_config = {"extra": "forbid"}

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> RunReport:
        return cls.model_validate_json(
            Path(path).read_text(encoding="utf-8")
        )


def digest_text(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def skew_report(studies: Sequence[StudySummary]) -> SkewReport:
    """Mean Bowley skewness over studies reporting both quartiles."""
    triples = [
        (s.quantiles.q1, s.quantiles.median, s.quantiles.q3)
        for s in studies
        if s.has_quartiles
    ]
    mean_skb, used = mean_bowley_skewness(triples)
    if used < len(triples):
        logger.warning(
            "skewness skipped {} studies with zero IQR",
            len(triples) - used,
        )
    if mean_skb is None:
        return SkewReport(
            mean_skb=None,
            skew_level=None,
            n_studies=0,
            recommendation="no study reports quartiles",
        )
    return SkewReport(
        mean_skb=mean_skb,
        skew_level=classify_skew(mean_skb),
        n_studies=used,
        recommendation=(
            MEDIAN_RECOMMENDATION
            if mean_skb > LOW_MAX
            else NEUTRAL_RECOMMENDATION
        ),
    )


def forest_row(
    study: StudySummary, included: bool, reason: str | None = None
) -> ForestRow:
    q = study.quantiles
    spread = study.spread_type
    low = high = None
    if spread is SpreadType.Q1Q3:
        low, high = q.q1, q.q3
    elif spread is SpreadType.MINMAX:
        low, high = q.min, q.max
    est_mean = est_sd = None
    if q is not None and spread in (SpreadType.Q1Q3, SpreadType.MINMAX):
        try:
            est = estimate_mean_sd(study)
            est_mean, est_sd = est.mean, est.sd
        except IneligibleStudyError:
            pass
    return ForestRow(
        id=study.id,
        n=study.n,
        point=study.median if study.median is not None else study.mean,
        median=study.median,
        spread_type=spread,
        spread_low=low,
        spread_high=high,
        est_mean=est_mean,
        est_sd=est_sd,
        included=included,
        reason=reason,
    )


def build_run_report(
    studies: Sequence[StudySummary],
    approaches: Sequence[Approach],
    *,
    exclude: Sequence[str] = (),
    subgroup: Subgroup = Subgroup.ALL,
    input_digest: str = "",
    source: str | None = None,
) -> RunReport:
    """
    Pool the studies with each approach after applying exclusions and
    the subgroup filter.

    Raises:
        NoEligibleStudiesError: nothing left to pool for an approach.
        IneligibleStudyError: a MEANS approach met a study without
            mean+se.
    """
    unknown = sorted(set(exclude) - {s.id for s in studies})
    if unknown:
        logger.warning(
            "--exclude ids not in the table: {}", ", ".join(unknown)
        )
    reasons: dict[str, str] = {}
    pool_set: list[StudySummary] = []
    for study in studies:
        if study.id in exclude:
            reasons[study.id] = "excluded"
        elif not subgroup.admits(study):
            reasons[study.id] = f"outside subgroup {subgroup.value}"
        else:
            pool_set.append(study)
    if not pool_set:
        raise NoEligibleStudiesError(
            "no studies left after exclusions and subgroup filter"
        )

    results = []
    for approach in approaches:
        estimate, inputs = apply_approach_detailed(
            pool_set, approach, drop_unusable=True
        )
        if inputs.dropped:
            logger.info(
                "{} dropped {} studies: {}",
                approach.value,
                len(inputs.dropped),
                ", ".join(inputs.dropped),
            )
        heterogeneity = None
        if estimate.q_stat is not None and estimate.i2 is not None:
            heterogeneity = Heterogeneity(
                q_stat=estimate.q_stat,
                q_pvalue=estimate.q_pvalue,
                tau2=estimate.tau2,
                i2=estimate.i2,
            )
        results.append(
            ApproachResult(
                approach=approach,
                family=pooler_for(approach).family_name,
                estimate=estimate,
                included_ids=inputs.study_ids,
                excluded=dict(inputs.dropped),
                heterogeneity=heterogeneity,
            )
        )

    return RunReport(
        results=results,
        skew=skew_report(pool_set),
        studies=[
            forest_row(s, s.id not in reasons, reasons.get(s.id))
            for s in studies
        ],
        provenance=Provenance(
            input_digest=input_digest,
            source=source,
            created_utc=datetime.now(timezone.utc).isoformat(),
            subgroup=subgroup,
            exclude=list(exclude),
        ),
    )
