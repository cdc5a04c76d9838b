"""Simulation study: grid, data generation, evaluation, aggregation."""

from median_meta.simulation.aggregation import (
    APE_CUTOFF,
    AggregateCell,
    DiscrepancySummary,
    FactorSummary,
    MetricSummary,
    ReportingRate,
    aggregate,
    compare_weighted_unweighted,
    reporting_rates,
    summarize_factors,
)
from median_meta.simulation.config import (
    SIMULATED_COMBOS,
    Scenario,
    ScalingStep,
    SimConfig,
    approaches_for,
    default_grid,
)
from median_meta.simulation.evaluation import (
    PerformanceRecord,
    dataset_skewness,
    evaluate_dataset,
)
from median_meta.simulation.generation import (
    GeneratedDataset,
    GeneratedStudy,
    TruthPair,
    compute_scale_m,
    draw_outcomes,
    draw_study_size,
    generate_dataset,
    true_values,
)
from median_meta.simulation.reporting import (
    assign_reporting,
    median_share,
)
from median_meta.simulation.runner import (
    GridResult,
    run_config,
    run_grid,
    run_grid_async,
)

__all__ = [
    "APE_CUTOFF",
    "AggregateCell",
    "DiscrepancySummary",
    "FactorSummary",
    "GeneratedDataset",
    "GeneratedStudy",
    "GridResult",
    "MetricSummary",
    "SIMULATED_COMBOS",
    "PerformanceRecord",
    "ReportingRate",
    "Scenario",
    "ScalingStep",
    "SimConfig",
    "TruthPair",
    "aggregate",
    "approaches_for",
    "assign_reporting",
    "compare_weighted_unweighted",
    "compute_scale_m",
    "dataset_skewness",
    "default_grid",
    "draw_outcomes",
    "draw_study_size",
    "evaluate_dataset",
    "generate_dataset",
    "median_share",
    "reporting_rates",
    "run_config",
    "run_grid",
    "run_grid_async",
    "summarize_factors",
    "true_values",
]
