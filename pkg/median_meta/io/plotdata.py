"""
Plot-ready data: interaction plots of a metric against skew level or
tau2, coverage by skew level, and forest-plot rows from a run report.
Figures themselves are not drawn.
"""

from __future__ import annotations

from pathlib import Path

import pandas as pd

from median_meta.errors import TableValidationError
from median_meta.io.report import RunReport
from median_meta.io.writers import write_frame
from median_meta.schema import SkewLevel

METRICS = ("ape", "pe", "mse")
LOG_SCALE_METRICS = frozenset({"ape", "mse"})
SKEW_ORDER = [level.value for level in SkewLevel]

INTERACTION_COLUMNS = (
    "approach",
    "scenario",
    "k",
    "size_median",
    "tau2",
    "skew_level",
    "metric",
    "median",
    "q1",
    "q3",
    "log_scale",
)

_REQUIRED = (
    "approach",
    "scenario",
    "k_studies",
    "size_median",
    "tau2",
    "skew_level",
    "observed",
    "coverage",
) + tuple(f"{m}_{p}" for m in METRICS for p in ("med", "q1", "q3"))


def load_aggregates(path: str | Path) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise TableValidationError([f"aggregates file not found: {path}"])
    frame = pd.read_csv(path)
    missing = [c for c in _REQUIRED if c not in frame.columns]
    if missing:
        raise TableValidationError(
            [f"{path}: missing columns " + ", ".join(missing)]
        )
    frame["observed"] = frame["observed"].astype(str).str.lower() == "true"
    return frame


def _slice(frame: pd.DataFrame, k: int, size_median: int) -> pd.DataFrame:
    return frame[
        frame["observed"]
        & (frame["k_studies"] == k)
        & (frame["size_median"] == size_median)
    ]


def _long(frame: pd.DataFrame) -> pd.DataFrame:
    parts = []
    for metric in METRICS:
        part = pd.DataFrame(
            {
                "approach": frame["approach"],
                "scenario": frame["scenario"],
                "k": frame["k_studies"],
                "size_median": frame["size_median"],
                "tau2": frame["tau2"],
                "skew_level": frame["skew_level"],
                "metric": metric,
                "median": frame[f"{metric}_med"],
                "q1": frame[f"{metric}_q1"],
                "q3": frame[f"{metric}_q3"],
                "log_scale": metric in LOG_SCALE_METRICS,
            }
        )
        parts.append(part)
    out = pd.concat(parts, ignore_index=True)
    if out.empty:
        return pd.DataFrame(columns=list(INTERACTION_COLUMNS))
    out["skew_rank"] = out["skew_level"].map(SKEW_ORDER.index)
    out = out.sort_values(
        ["metric", "approach", "scenario", "tau2", "skew_rank"],
        kind="mergesort",
    )
    return out.drop(columns="skew_rank")[list(INTERACTION_COLUMNS)]


def interaction_by_skew(
    frame: pd.DataFrame,
    *,
    tau2: float = 0.25,
    k: int = 50,
    size_median: int = 100,
) -> pd.DataFrame:
    """Metric against skew level at a fixed tau2."""
    part = _slice(frame, k, size_median)
    return _long(part[(part["tau2"] - tau2).abs() < 1e-12])


def interaction_by_tau2(
    frame: pd.DataFrame,
    *,
    skew_level: SkewLevel = SkewLevel.HIGH,
    k: int = 50,
    size_median: int = 100,
) -> pd.DataFrame:
    """Metric against tau2 at a fixed skew level."""
    part = _slice(frame, k, size_median)
    return _long(part[part["skew_level"] == skew_level.value])


def coverage_by_skew(
    frame: pd.DataFrame, *, k: int = 50, size_median: int = 100
) -> pd.DataFrame:
    part = _slice(frame, k, size_median)
    out = part[
        ["approach", "scenario", "tau2", "skew_level", "coverage"]
    ].copy()
    out["skew_rank"] = out["skew_level"].map(SKEW_ORDER.index)
    out = out.sort_values(
        ["approach", "scenario", "tau2", "skew_rank"], kind="mergesort"
    )
    return out.drop(columns="skew_rank")


FOREST_COLUMNS = (
    "row_type",
    "id",
    "n",
    "point",
    "ci_low",
    "ci_high",
    "spread_type",
    "spread_low",
    "spread_high",
    "est_mean",
    "est_sd",
    "included",
)


def forest_rows(report: RunReport) -> pd.DataFrame:
    """One row per input study, then one pooled row per approach."""
    rows = []
    for study in report.studies:
        rows.append(
            {
                "row_type": "study",
                "id": study.id,
                "n": study.n,
                "point": study.point,
                "ci_low": None,
                "ci_high": None,
                "spread_type": study.spread_type.value,
                "spread_low": study.spread_low,
                "spread_high": study.spread_high,
                "est_mean": study.est_mean,
                "est_sd": study.est_sd,
                "included": study.included,
            }
        )
    for result in report.results:
        est = result.estimate
        rows.append(
            {
                "row_type": "pooled",
                "id": result.approach.value,
                "n": est.k,
                "point": est.point,
                "ci_low": est.ci_low,
                "ci_high": est.ci_high,
                "spread_type": None,
                "spread_low": None,
                "spread_high": None,
                "est_mean": None,
                "est_sd": None,
                "included": True,
            }
        )
    return pd.DataFrame(rows, columns=list(FOREST_COLUMNS))


def write_interaction_files(
    aggregates_path: str | Path,
    out_dir: str | Path,
    *,
    tau2: float = 0.25,
    skew_level: SkewLevel = SkewLevel.HIGH,
    k: int = 50,
    size_median: int = 100,
) -> list[Path]:
    frame = load_aggregates(aggregates_path)
    out_dir = Path(out_dir)
    written = []
    for name, data in (
        (
            "interaction_skew.csv",
            interaction_by_skew(
                frame, tau2=tau2, k=k, size_median=size_median
            ),
        ),
        (
            "interaction_tau2.csv",
            interaction_by_tau2(
                frame,
                skew_level=skew_level,
                k=k,
                size_median=size_median,
            ),
        ),
        (
            "coverage.csv",
            coverage_by_skew(frame, k=k, size_median=size_median),
        ),
    ):
        written.append(
            write_frame(
                data.to_dict(orient="records"),
                out_dir / name,
                list(data.columns),
            )
        )
    return written


def write_forest_file(
    report_path: str | Path, out_dir: str | Path
) -> Path:
    report_path = Path(report_path)
    if not report_path.is_file():
        raise TableValidationError([f"report not found: {report_path}"])
    data = forest_rows(RunReport.load(report_path))
    return write_frame(
        data.to_dict(orient="records"),
        Path(out_dir) / "forest.csv",
        list(data.columns),
    )
