"""Study tables, run reports, result writers and plot data."""

from median_meta.io.plotdata import (
    coverage_by_skew,
    forest_rows,
    interaction_by_skew,
    interaction_by_tau2,
    load_aggregates,
    write_forest_file,
    write_interaction_files,
)
from median_meta.io.report import (
    ApproachResult,
    ForestRow,
    RunReport,
    SkewReport,
    Subgroup,
    build_run_report,
    skew_report,
)
from median_meta.io.table import (
    CANONICAL_COLUMNS,
    StudyTableRow,
    load_studies,
    parse_study_table,
    serialize_study_table,
)
from median_meta.io.writers import (
    build_manifest,
    write_aggregates,
    write_discrepancy,
    write_factors,
    write_manifest,
    write_records,
    write_reporting,
)

__all__ = [
    "ApproachResult",
    "CANONICAL_COLUMNS",
    "ForestRow",
    "RunReport",
    "SkewReport",
    "StudyTableRow",
    "Subgroup",
    "build_manifest",
    "build_run_report",
    "coverage_by_skew",
    "forest_rows",
    "interaction_by_skew",
    "interaction_by_tau2",
    "load_aggregates",
    "load_studies",
    "parse_study_table",
    "serialize_study_table",
    "skew_report",
    "write_aggregates",
    "write_discrepancy",
    "write_factors",
    "write_forest_file",
    "write_interaction_files",
    "write_manifest",
    "write_records",
    "write_reporting",
]
