"""
Domain records (Pydantic) shared by the estimators, pooling, simulation
and I/O layers: study summaries, per-study mean/SD estimates, pooled
estimates and the enums naming approaches and skew levels.
"""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, Field, model_validator


class SkewLevel(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"
    VERY_HIGH = "VeryHigh"


class Target(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"


class Approach(str, Enum):
    """The eight pooling approaches."""

    T1_FE = "T1_FE"
    T1_RE = "T1_RE"
    T2_FE = "T2_FE"
    T2_RE = "T2_RE"
    MEANS_FE = "MEANS_FE"
    MEANS_RE = "MEANS_RE"
    MM = "MM"
    WM = "WM"

    @property
    def target(self) -> Target:
        if self in (Approach.MM, Approach.WM):
            return Target.MEDIAN
        return Target.MEAN

    @property
    def random_effects(self) -> bool:
        return self.value.endswith("_RE")

    @property
    def family(self) -> str:
        """'median', 'means' or 'transformation'."""
        if self.target is Target.MEDIAN:
            return "median"
        if self.value.startswith("MEANS"):
            return "means"
        return "transformation"


class SpreadType(str, Enum):
    Q1Q3 = "q1q3"
    MINMAX = "minmax"
    MEAN_SE = "mean_se"
    NONE = "none"


class EstimateSource(str, Enum):
    T1 = "T1"
    T2 = "T2"
    REPORTED = "Reported"


class QuantileSummary(BaseModel):
    """Five-number summary; only the median is mandatory."""

    min: float | None = None
    q1: float | None = None
    median: float
    q3: float | None = None
    max: float | None = None

    model_config = {"extra": "forbid", "frozen": True}

    @model_validator(mode="after")
    def _check_order(self) -> QuantileSummary:
        present = [
            (name, value)
            for name, value in (
                ("min", self.min),
                ("q1", self.q1),
                ("median", self.median),
                ("q3", self.q3),
                ("max", self.max),
            )
            if value is not None
        ]
        for name, value in present:
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        for (lo_name, lo), (hi_name, hi) in zip(present, present[1:]):
            if lo > hi:
                raise ValueError(
                    f"{lo_name} ({lo}) exceeds {hi_name} ({hi})"
                )
        return self

    @property
    def has_quartiles(self) -> bool:
        return self.q1 is not None and self.q3 is not None

    @property
    def has_range(self) -> bool:
        return self.min is not None and self.max is not None


class StudySummary(BaseModel):
    """One study's reported aggregates."""

    id: str
    n: int | None = Field(default=None, ge=1)
    mean: float | None = None
    se: float | None = Field(default=None, gt=0)
    quantiles: QuantileSummary | None = None

    model_config = {"extra": "forbid", "frozen": True}

    @model_validator(mode="after")
    def _check_usable(self) -> StudySummary:
        if not self.has_mean_se and self.quantiles is None:
            raise ValueError(
                f"study {self.id!r} reports neither mean+se nor a median"
            )
        return self

    @property
    def has_mean_se(self) -> bool:
        return self.mean is not None and self.se is not None

    @property
    def median(self) -> float | None:
        return self.quantiles.median if self.quantiles else None

    @property
    def has_quartiles(self) -> bool:
        return bool(self.quantiles and self.quantiles.has_quartiles)

    @property
    def has_range(self) -> bool:
        return bool(self.quantiles and self.quantiles.has_range)

    @property
    def spread_type(self) -> SpreadType:
        """Spread the study offers, quartiles taking precedence."""
        if self.has_quartiles:
            return SpreadType.Q1Q3
        if self.has_range:
            return SpreadType.MINMAX
        if self.has_mean_se:
            return SpreadType.MEAN_SE
        return SpreadType.NONE


class MeanSdEstimate(BaseModel):
    """Sample mean, SD and standard error of one study."""

    mean: float
    sd: float | None = Field(default=None, gt=0)
    se: float = Field(gt=0)
    source: EstimateSource

    model_config = {"extra": "forbid", "frozen": True}


class PooledEstimate(BaseModel):
    """Output of every pooling approach."""

    target: Target
    point: float
    ci_low: float
    ci_high: float
    se: float | None = None
    tau2: float | None = Field(default=None, ge=0)
    q_stat: float | None = Field(default=None, ge=0)
    q_pvalue: float | None = Field(default=None, ge=0, le=1)
    i2: float | None = Field(default=None, ge=0, le=100)
    k: int = Field(ge=1)

    model_config = {"extra": "forbid", "frozen": True}

    @model_validator(mode="after")
    def _check_interval(self) -> PooledEstimate:
        slack = 1e-9 * max(1.0, abs(self.point))
        if not (
            self.ci_low - slack <= self.point <= self.ci_high + slack
        ):
            raise ValueError(
                f"interval ({self.ci_low}, {self.ci_high}) does not "
                f"contain the point {self.point}"
            )
        return self

    def covers(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high
