"""
CSV and JSON writers for simulation outputs. CSVs have a header row,
no index column, dot decimals and floats formatted with %.10g; missing
values are empty cells.
"""

from __future__ import annotations

import json
import platform
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd
import scipy
from loguru import logger

from median_meta import __version__
from median_meta.settings import SimulationSettings
from median_meta.simulation.aggregation import (
    AggregateCell,
    DiscrepancySummary,
    FactorSummary,
    ReportingRate,
)
from median_meta.simulation.evaluation import PerformanceRecord

FLOAT_FORMAT = "%.10g"

AGGREGATES_FILE = "aggregates.csv"
RECORDS_FILE = "records.csv"
FACTORS_FILE = "factors.csv"
REPORTING_FILE = "reporting.csv"
DISCREPANCY_FILE = "mm_vs_wm.csv"
MANIFEST_FILE = "manifest.json"


def write_frame(
    rows: Iterable[dict[str, Any]],
    path: Path,
    columns: Sequence[str] | None = None,
) -> Path:
    frame = pd.DataFrame(list(rows), columns=columns)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
    )
    logger.info("wrote {} ({} rows)", path, len(frame))
    return path


AGGREGATE_COLUMNS = (
    "approach",
    "scenario",
    "k_studies",
    "size_median",
    "tau2",
    "skew_level",
    "observed",
    "n_datasets",
    "ape_med",
    "ape_q1",
    "ape_q3",
    "pe_med",
    "pe_q1",
    "pe_q3",
    "mse_med",
    "mse_q1",
    "mse_q3",
    "coverage",
    "mean_tau2_hat",
    "mean_i2",
)


def write_aggregates(
    cells: Iterable[AggregateCell], path: Path
) -> Path:
    return write_frame(
        (c.to_row() for c in cells), path, AGGREGATE_COLUMNS
    )


def write_records(
    records: Iterable[PerformanceRecord], path: Path
) -> Path:
    return write_frame((r.to_row() for r in records), path)


def _model_rows(models: Iterable[Any]) -> list[dict[str, Any]]:
    return [m.model_dump(mode="json") for m in models]


def write_factors(
    summaries: Iterable[FactorSummary], path: Path
) -> Path:
    return write_frame(_model_rows(summaries), path)


def write_reporting(
    rates: Iterable[ReportingRate], path: Path
) -> Path:
    return write_frame(_model_rows(rates), path)


def write_discrepancy(
    rows: Iterable[DiscrepancySummary], path: Path
) -> Path:
    return write_frame(_model_rows(rows), path)


def build_manifest(
    settings: SimulationSettings,
    *,
    n_configs: int,
    n_records: int,
    dropped: int,
    elapsed_seconds: float,
    files: Sequence[str],
) -> dict[str, Any]:
    """Config echo plus what is needed to rerun the simulation exactly."""
    return {
        "tool": "median-meta",
        "tool_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "settings": settings.model_dump(mode="json"),
        "seed": settings.seed,
        "n_configs": n_configs,
        "n_records": n_records,
        "dropped_evaluations": dropped,
        "elapsed_seconds": round(elapsed_seconds, 3),
        "files": list(files),
        "environment": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        },
    }


def write_manifest(manifest: dict[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    logger.info("wrote {}", path)
    return path
