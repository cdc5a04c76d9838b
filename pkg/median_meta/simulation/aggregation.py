"""
Grouped summaries of performance records: the appendix-style cells
(median and quartiles of APE, PE and squared error plus coverage per
approach, scenario, design and skew level), factor-level summaries,
median-reporting rates and the MM/WM discrepancy breakdown.

Records are flattened into a DataFrame (enums as their values) and
grouped with pandas.
"""

from __future__ import annotations

from dataclasses import fields
from typing import Iterable

import pandas as pd
from pydantic import BaseModel, Field, model_validator

from median_meta.schema import Approach, SkewLevel
from median_meta.simulation.config import Scenario
from median_meta.simulation.evaluation import PerformanceRecord

APE_CUTOFF = 500.0

FACTORS = ("skew_level", "tau2", "k_studies", "size_median")

RECORD_COLUMNS = [f.name for f in fields(PerformanceRecord)]
DESIGN_KEYS = ["approach", "scenario", "k_studies", "size_median", "tau2"]
CELL_KEYS = DESIGN_KEYS + ["skew_level"]
DATASET_KEYS = [
    "k_studies",
    "size_median",
    "tau2",
    "sigma2",
    "scaling_step",
    "dataset_index",
]


def records_frame(records: Iterable[PerformanceRecord]) -> pd.DataFrame:
    """One row per record; missing tau2/I2 become NaN."""
    frame = pd.DataFrame(
        [r.to_row() for r in records], columns=RECORD_COLUMNS
    )
    return frame.astype({"tau2_hat": float, "i2": float})


def _kept(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[frame["ape"] <= APE_CUTOFF]


class MetricSummary(BaseModel):
    """Median with first and third quartiles."""

    med: float
    q1: float
    q3: float

    model_config = {"extra": "forbid", "frozen": True}

    @model_validator(mode="after")
    def _check_order(self) -> MetricSummary:
        if not (self.q1 <= self.med <= self.q3):
            raise ValueError("quartiles must bracket the median")
        return self


def _summarize(values: pd.Series) -> MetricSummary:
    q1, med, q3 = values.quantile([0.25, 0.5, 0.75])
    return MetricSummary(med=float(med), q1=float(q1), q3=float(q3))


def _mean_or_none(values: pd.Series) -> float | None:
    mean = values.mean()
    return None if pd.isna(mean) else float(mean)


class AggregateCell(BaseModel):
    """One (approach, scenario, design, skew level) cell; NA when empty."""

    approach: Approach
    scenario: Scenario
    k_studies: int
    size_median: int
    tau2: float
    skew_level: SkewLevel
    ape: MetricSummary | None = None
    pe: MetricSummary | None = None
    mse: MetricSummary | None = None
    coverage: float | None = Field(default=None, ge=0, le=1)
    mean_tau2_hat: float | None = None
    mean_i2: float | None = None
    n_datasets: int = Field(default=0, ge=0)
    observed: bool = False

    model_config = {"extra": "forbid", "frozen": True}

    def to_row(self) -> dict[str, object]:
        row: dict[str, object] = {
            "approach": self.approach.value,
            "scenario": self.scenario.value,
            "k_studies": self.k_studies,
            "size_median": self.size_median,
            "tau2": self.tau2,
            "skew_level": self.skew_level.value,
            "observed": self.observed,
            "n_datasets": self.n_datasets,
        }
        for name in ("ape", "pe", "mse"):
            summary = getattr(self, name)
            for part in ("med", "q1", "q3"):
                row[f"{name}_{part}"] = (
                    getattr(summary, part) if summary else None
                )
        row["coverage"] = self.coverage
        row["mean_tau2_hat"] = self.mean_tau2_hat
        row["mean_i2"] = self.mean_i2
        return row


def aggregate(
    records: Iterable[PerformanceRecord],
) -> list[AggregateCell]:
    """
    Appendix cells. Records with APE above 500% are dropped first; every
    skew level missing for a design seen in the records becomes an NA
    cell.
    """
    frame = records_frame(records)
    designs = (
        frame[DESIGN_KEYS].drop_duplicates().sort_values(DESIGN_KEYS)
    )
    groups = dict(list(_kept(frame).groupby(CELL_KEYS)))

    cells = []
    for approach, scenario, k, size, tau2 in designs.itertuples(
        index=False, name=None
    ):
        for level in SkewLevel:
            group = groups.get(
                (approach, scenario, k, size, tau2, level.value)
            )
            base = dict(
                approach=Approach(approach),
                scenario=Scenario(scenario),
                k_studies=int(k),
                size_median=int(size),
                tau2=float(tau2),
                skew_level=level,
            )
            if group is None or group.empty:
                cells.append(AggregateCell(**base))
                continue
            cells.append(
                AggregateCell(
                    **base,
                    ape=_summarize(group["ape"]),
                    pe=_summarize(group["pe"]),
                    mse=_summarize(group["sq_err"]),
                    coverage=float(group["covered"].mean()),
                    mean_tau2_hat=_mean_or_none(group["tau2_hat"]),
                    mean_i2=_mean_or_none(group["i2"]),
                    n_datasets=len(group),
                    observed=True,
                )
            )
    return cells


class FactorSummary(BaseModel):
    """Overall performance at one level of one design factor."""

    approach: Approach
    scenario: Scenario
    factor: str
    level: str
    n_datasets: int
    ape_med: float
    pe_med: float
    mse_med: float
    coverage: float

    model_config = {"extra": "forbid", "frozen": True}


def _level_label(value: object) -> str:
    return value if isinstance(value, str) else f"{value:g}"


def summarize_factors(
    records: Iterable[PerformanceRecord],
) -> list[FactorSummary]:
    """Median APE/PE/MSE and coverage per level of each factor."""
    kept = _kept(records_frame(records))
    long = pd.concat(
        [
            kept.assign(
                factor=factor, level=kept[factor].map(_level_label)
            )
            for factor in FACTORS
        ],
        ignore_index=True,
    )
    summary = long.groupby(
        ["approach", "scenario", "factor", "level"]
    ).agg(
        n_datasets=("ape", "size"),
        ape_med=("ape", "median"),
        pe_med=("pe", "median"),
        mse_med=("sq_err", "median"),
        coverage=("covered", "mean"),
    )
    return [
        FactorSummary(
            approach=Approach(approach),
            scenario=Scenario(scenario),
            factor=factor,
            level=level,
            n_datasets=int(row.n_datasets),
            ape_med=float(row.ape_med),
            pe_med=float(row.pe_med),
            mse_med=float(row.mse_med),
            coverage=float(row.coverage),
        )
        for (approach, scenario, factor, level), row in summary.iterrows()
    ]


class ReportingRate(BaseModel):
    """Share of studies reporting a median in the mixed scenario."""

    dimension: str
    level: str
    n_datasets: int
    n_studies: int
    median_share: float = Field(ge=0, le=1)

    model_config = {"extra": "forbid", "frozen": True}


def reporting_rates(
    records: Iterable[PerformanceRecord],
) -> list[ReportingRate]:
    """
    Study-weighted median-reporting share of the mixed scenario, overall,
    by skew level and by tau2. Each dataset counts once however many
    approaches scored it.
    """
    frame = records_frame(records)
    mixed = frame[frame["scenario"] == Scenario.MIXED.value]
    datasets = mixed.drop_duplicates(subset=DATASET_KEYS).assign(
        overall="all",
        tau2_level=lambda d: d["tau2"].map(_level_label),
        median_studies=lambda d: d["median_share"] * d["k_studies"],
    )

    out = []
    for dimension, column in (
        ("overall", "overall"),
        ("skew_level", "skew_level"),
        ("tau2", "tau2_level"),
    ):
        sums = datasets.groupby(column).agg(
            n_datasets=("k_studies", "size"),
            n_studies=("k_studies", "sum"),
            medians=("median_studies", "sum"),
        )
        for level, row in sums.iterrows():
            out.append(
                ReportingRate(
                    dimension=dimension,
                    level=str(level),
                    n_datasets=int(row.n_datasets),
                    n_studies=int(row.n_studies),
                    median_share=min(
                        1.0, float(row.medians / row.n_studies)
                    ),
                )
            )
    return out


class DiscrepancySummary(BaseModel):
    """MM and WM accuracy on datasets split by WM > 2 x MM."""

    group: str
    n_datasets: int
    mm_ape_med: float | None
    wm_ape_med: float | None

    model_config = {"extra": "forbid", "frozen": True}


def compare_weighted_unweighted(
    records: Iterable[PerformanceRecord],
) -> list[DiscrepancySummary]:
    """
    Pair MM and WM records of the same dataset and compare their median
    APE where the WM estimate exceeds twice the MM estimate and
    elsewhere.
    """
    frame = records_frame(records)
    pair_keys = ["scenario"] + DATASET_KEYS

    def side(approach: Approach) -> pd.DataFrame:
        rows = frame[frame["approach"] == approach.value]
        return rows.drop_duplicates(subset=pair_keys, keep="last")[
            pair_keys + ["estimate", "ape"]
        ]

    pairs = side(Approach.MM).merge(
        side(Approach.WM), on=pair_keys, suffixes=("_mm", "_wm")
    )
    wm_high = pairs["estimate_wm"] > 2.0 * pairs["estimate_mm"]

    out = []
    for group, part in (
        ("wm_gt_2mm", pairs[wm_high]),
        ("other", pairs[~wm_high]),
    ):
        out.append(
            DiscrepancySummary(
                group=group,
                n_datasets=len(part),
                mm_ape_med=float(part["ape_mm"].median())
                if len(part)
                else None,
                wm_ape_med=float(part["ape_wm"].median())
                if len(part)
                else None,
            )
        )
    return out
