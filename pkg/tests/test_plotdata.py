"""
Tests for the result writers and plot-ready data.
"""

from __future__ import annotations

import json
from pathlib import Path

import pandas as pd
import pytest

from median_meta.errors import TableValidationError
from median_meta.io.plotdata import (
    FOREST_COLUMNS,
    INTERACTION_COLUMNS,
    coverage_by_skew,
    forest_rows,
    interaction_by_skew,
    interaction_by_tau2,
    load_aggregates,
    write_forest_file,
    write_interaction_files,
)
from median_meta.io.report import build_run_report
from median_meta.io.table import load_studies
from median_meta.io.writers import (
    AGGREGATE_COLUMNS,
    build_manifest,
    write_aggregates,
    write_frame,
    write_manifest,
    write_records,
)
from median_meta.schema import Approach, SkewLevel
from median_meta.settings import SimulationSettings
from median_meta.simulation import (
    PerformanceRecord,
    Scenario,
    ScalingStep,
    aggregate,
)


def _record(**overrides) -> PerformanceRecord:
    values = dict(
        approach=Approach.MM,
        scenario=Scenario.ALL_MEDIANS_Q1Q3,
        scaling_step=ScalingStep.MEDIAN_IS_5,
        k_studies=50,
        size_median=100,
        tau2=0.25,
        sigma2=1.0,
        dataset_index=0,
        estimate=5.5,
        truth=5.0,
        pe=10.0,
        ape=10.0,
        sq_err=0.25,
        covered=True,
        ci_low=4.0,
        ci_high=6.0,
        mean_skb=0.3,
        skew_level=SkewLevel.HIGH,
    )
    values.update(overrides)
    return PerformanceRecord(**values)


@pytest.fixture
def records() -> list[PerformanceRecord]:
    out = []
    for i, (tau2, sigma2, level, ape) in enumerate(
        [
            (0.25, 1.0, SkewLevel.HIGH, 6.0),
            (0.25, 1 / 16, SkewLevel.LOW, 3.0),
            (1.0, 1.0, SkewLevel.HIGH, 9.0),
        ]
    ):
        for approach in (Approach.MM, Approach.WM):
            out.append(
                _record(
                    approach=approach,
                    dataset_index=i,
                    tau2=tau2,
                    sigma2=sigma2,
                    skew_level=level,
                    ape=ape,
                    pe=-ape,
                )
            )
    out.append(_record(k_studies=15, size_median=50))
    return out


@pytest.fixture
def aggregates_path(records, temp_dir: Path) -> Path:
    return write_aggregates(
        aggregate(records), temp_dir / "aggregates.csv"
    )


class TestWriters:
    """Test CSV and manifest writers."""

    def test_aggregates_columns(self, aggregates_path: Path):
        frame = pd.read_csv(aggregates_path)
        assert tuple(frame.columns) == AGGREGATE_COLUMNS
        # 5 designs x 4 skew levels
        assert len(frame) == 20
        na = frame[frame["observed"] == False]  # noqa: E712
        assert na["ape_med"].isna().all()

    def test_float_format(self, temp_dir: Path):
        path = write_frame(
            [{"x": 1 / 3, "y": None}], temp_dir / "f.csv", ["x", "y"]
        )
        assert path.read_text().splitlines() == [
            "x,y",
            "0.3333333333,",
        ]

    def test_records(self, records, temp_dir: Path):
        path = write_records(records, temp_dir / "records.csv")
        frame = pd.read_csv(path)
        assert len(frame) == len(records)
        assert set(frame["approach"]) == {"MM", "WM"}
        assert "median_share" in frame.columns

    def test_manifest(self, temp_dir: Path):
        manifest = build_manifest(
            SimulationSettings(replications=3, seed=5),
            n_configs=2,
            n_records=12,
            dropped=0,
            elapsed_seconds=1.23456,
            files=["aggregates.csv"],
        )
        path = write_manifest(manifest, temp_dir / "manifest.json")
        loaded = json.loads(path.read_text())
        assert loaded["seed"] == 5
        assert loaded["settings"]["replications"] == 3
        assert loaded["elapsed_seconds"] == 1.235
        assert "numpy" in loaded["environment"]


class TestInteraction:
    """Test the interaction and coverage tables."""

    def test_load(self, aggregates_path: Path):
        frame = load_aggregates(aggregates_path)
        assert frame["observed"].dtype == bool
        assert frame["observed"].sum() == 7

    def test_load_missing_columns(self, temp_dir: Path):
        path = temp_dir / "bad.csv"
        path.write_text("approach,scenario\nMM,Mixed\n")
        with pytest.raises(TableValidationError):
            load_aggregates(path)

    def test_load_missing_file(self, temp_dir: Path):
        with pytest.raises(TableValidationError):
            load_aggregates(temp_dir / "none.csv")

    def test_by_skew(self, aggregates_path: Path):
        data = interaction_by_skew(load_aggregates(aggregates_path))
        assert tuple(data.columns) == INTERACTION_COLUMNS
        # 3 metrics x 2 approaches x 2 observed skew levels
        assert len(data) == 12
        ape = data[data["metric"] == "ape"]
        assert list(ape["skew_level"]) == ["Low", "High"] * 2
        assert list(ape["median"]) == [3.0, 6.0] * 2
        assert ape["log_scale"].all()
        assert not data[data["metric"] == "pe"]["log_scale"].any()

    def test_by_tau2(self, aggregates_path: Path):
        data = interaction_by_tau2(load_aggregates(aggregates_path))
        ape = data[
            (data["metric"] == "ape") & (data["approach"] == "MM")
        ]
        assert list(ape["tau2"]) == [0.25, 1.0]
        assert list(ape["median"]) == [6.0, 9.0]

    def test_other_slice_is_empty(self, aggregates_path: Path):
        data = interaction_by_skew(
            load_aggregates(aggregates_path), k=15, size_median=100
        )
        assert data.empty
        assert tuple(data.columns) == INTERACTION_COLUMNS

    def test_coverage(self, aggregates_path: Path):
        data = coverage_by_skew(load_aggregates(aggregates_path))
        assert len(data) == 6
        assert (data["coverage"] == 1.0).all()

    def test_write_files(self, aggregates_path: Path, temp_dir: Path):
        written = write_interaction_files(
            aggregates_path, temp_dir / "plots"
        )
        assert [p.name for p in written] == [
            "interaction_skew.csv",
            "interaction_tau2.csv",
            "coverage.csv",
        ]
        assert all(p.is_file() for p in written)


class TestForest:
    """Test forest rows from a run report."""

    def test_rows(self, fixture_table: Path, temp_dir: Path):
        report = build_run_report(
            load_studies(fixture_table), [Approach.MM, Approach.WM]
        )
        data = forest_rows(report)
        assert tuple(data.columns) == FOREST_COLUMNS
        assert len(data) == 52
        pooled = data[data["row_type"] == "pooled"]
        assert list(pooled["id"]) == ["MM", "WM"]
        assert list(pooled["point"]) == [18.0, 60.0]

    def test_write(self, fixture_table: Path, temp_dir: Path):
        report = build_run_report(
            load_studies(fixture_table), [Approach.MM]
        )
        report_path = report.save(temp_dir / "report.json")
        path = write_forest_file(report_path, temp_dir / "plots")
        frame = pd.read_csv(path)
        assert len(frame) == 51
        assert frame.iloc[0]["id"] == "q01"

    def test_missing_report(self, temp_dir: Path):
        with pytest.raises(TableValidationError):
            write_forest_file(temp_dir / "none.json", temp_dir)
