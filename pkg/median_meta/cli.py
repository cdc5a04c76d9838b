"""
Command-line interface for median-meta.

Usage:
  medianmeta --help
  medianmeta pool studies.csv --approach mm --approach wm --exclude s07
  medianmeta pool studies.csv --approach t1 --effect re --subgroup q1q3
  medianmeta simulate --config sim.env --replications 100 --seed 42
  medianmeta plotdata --aggregates results/aggregates.csv
  medianmeta settings

Exit codes: 0 success, 2 invalid input (table, config, arguments),
3 no eligible studies for a requested approach.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError
from rich import box
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.rule import Rule
from rich.table import Table

from median_meta import __version__
from median_meta.errors import (
    ConfigError,
    IneligibleStudyError,
    NoEligibleStudiesError,
    TableValidationError,
)
from median_meta.io.plotdata import (
    write_forest_file,
    write_interaction_files,
)
from median_meta.io.report import (
    RunReport,
    Subgroup,
    build_run_report,
    digest_text,
)
from median_meta.io.table import parse_study_table
from median_meta.io.writers import (
    AGGREGATES_FILE,
    DISCREPANCY_FILE,
    FACTORS_FILE,
    MANIFEST_FILE,
    RECORDS_FILE,
    REPORTING_FILE,
    build_manifest,
    write_aggregates,
    write_discrepancy,
    write_factors,
    write_manifest,
    write_records,
    write_reporting,
)
from median_meta.schema import Approach, SkewLevel
from median_meta.settings import (
    LOG_LEVEL_ENV,
    SETTING_KEYS,
    env_key,
    load_settings,
    log_level,
)
from median_meta.simulation.aggregation import (
    compare_weighted_unweighted,
    reporting_rates,
    summarize_factors,
)
from median_meta.simulation.runner import run_grid

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NOT_APPLICABLE = 3

console = Console()
err_console = Console(stderr=True)

APPROACH_NAMES = {a.value.lower(): a for a in Approach}
# bare family names expand to the --effect variant(s)
FAMILY_NAMES = ("t1", "t2", "means")
DEFAULT_APPROACHES = ("mm", "wm", "t1")


def _find_dotenv_path() -> str | None:
    """
    Find a .env file in the current directory or its parents, stopping
    at the project root (a directory holding pyproject.toml).
    """
    cwd = os.path.abspath(os.getcwd())
    for _ in range(10):
        env_path = os.path.join(cwd, ".env")
        if os.path.isfile(env_path):
            return env_path
        if os.path.isfile(os.path.join(cwd, "pyproject.toml")):
            return None
        parent = os.path.dirname(cwd)
        if parent == cwd:
            break
        cwd = parent
    return None


def _ensure_dotenv() -> None:
    """Load .env (if any) without overriding variables already set."""
    path = _find_dotenv_path()
    if path:
        load_dotenv(path)


def _print_error(label: str, exc: Exception) -> None:
    err_console.print(f"[red]{label}:[/red] {escape(str(exc))}")


def configure_logging(level: str | None = None) -> None:
    """Single stderr sink at MEDIANMETA_LOG_LEVEL (default INFO)."""
    logger.remove()
    logger.add(
        sys.stderr,
        level=level or log_level(),
        format="<level>{level: <8}</level> {message}",
    )


def resolve_approaches(
    names: Sequence[str] | None, effect: str | None
) -> list[Approach]:
    """
    CLI approach names to Approach members, keeping order and dropping
    repeats. t1/t2/means become <family>_fe and/or <family>_re.
    """
    effects = ("fe", "re") if effect is None else (effect,)
    out: list[Approach] = []
    for name in names or DEFAULT_APPROACHES:
        key = name.strip().lower()
        if key in FAMILY_NAMES:
            expanded = [APPROACH_NAMES[f"{key}_{e}"] for e in effects]
        elif key in APPROACH_NAMES:
            expanded = [APPROACH_NAMES[key]]
        else:
            raise ConfigError(f"unknown approach {name!r}")
        for approach in expanded:
            if approach not in out:
                out.append(approach)
    return out


def _fmt(value: float | None) -> str:
    if value is None:
        return "-"
    if value != 0 and abs(value) < 1e-3:
        return f"{value:.3g}"
    return f"{value:.3f}"


def _print_pool_report(report: RunReport) -> None:
    table = Table(
        title="Pooled estimates",
        box=box.ROUNDED,
        border_style="cyan",
    )
    for column in (
        "approach",
        "family",
        "k",
        "target",
        "estimate",
        "95% CI",
    ):
        table.add_column(column, no_wrap=True)
    table.add_column("tau2 / I2 / p", no_wrap=True)
    for result in report.results:
        est = result.estimate
        het = result.heterogeneity
        het_text = (
            f"{_fmt(het.tau2)} / {het.i2:.2f}% / {_fmt(het.q_pvalue)}"
            if het
            else "-"
        )
        table.add_row(
            result.approach.value,
            result.family,
            str(est.k),
            est.target.value,
            _fmt(est.point),
            f"({_fmt(est.ci_low)}, {_fmt(est.ci_high)})",
            het_text,
        )
    console.print(table)

    for result in report.results:
        if result.excluded:
            console.print(
                f"  [yellow]{result.approach.value}[/yellow] left out: "
                + ", ".join(sorted(result.excluded))
            )
    filtered = [s.id for s in report.studies if not s.included]
    if filtered:
        console.print(
            "  [dim]not pooled (exclusion/subgroup):[/dim] "
            + ", ".join(filtered)
        )

    skew = report.skew
    if skew.mean_skb is None:
        skew_text = skew.recommendation
    else:
        skew_text = (
            f"mean Bowley skewness {skew.mean_skb:.3f} "
            f"({skew.skew_level.value}, {skew.n_studies} studies)\n"
            f"{skew.recommendation}"
        )
    console.print(Panel(skew_text, title="Skewness", border_style="cyan"))


def cmd_pool(args: argparse.Namespace) -> int:
    """
    Pool a study table with the requested approaches.

    Returns:
        0 on success, 2 for an invalid table or approach list, 3 when an
        approach has no eligible studies.
    """
    table_path = Path(args.table)
    try:
        rows = parse_study_table(table_path)
        approaches = resolve_approaches(args.approach, args.effect)
    except (TableValidationError, ConfigError) as exc:
        _print_error("error", exc)
        return EXIT_INVALID_INPUT
    studies = [row.to_summary() for row in rows]
    logger.info(
        "pooling {} studies from {} with {}",
        len(studies),
        table_path,
        ", ".join(a.value for a in approaches),
    )
    try:
        report = build_run_report(
            studies,
            approaches,
            exclude=args.exclude or (),
            subgroup=Subgroup(args.subgroup),
            input_digest=digest_text(
                table_path.read_text(encoding="utf-8")
            ),
            source=str(table_path),
        )
    except (NoEligibleStudiesError, IneligibleStudyError) as exc:
        _print_error("not applicable", exc)
        return EXIT_NOT_APPLICABLE
    _print_pool_report(report)
    if args.report:
        try:
            path = report.save(args.report)
        except OSError as exc:
            _print_error("error", exc)
            return EXIT_INVALID_INPUT
        logger.info("wrote {}", path)
    return EXIT_OK


def _simulate_overrides(args: argparse.Namespace) -> dict[str, object]:
    return {
        "replications": args.replications,
        "seed": args.seed,
        "output_dir": args.output_dir,
        "workers": args.workers,
        "write_records": args.records,
        "k_studies": args.k_studies,
        "size_medians": args.size_medians,
        "combos": args.combos,
        "scaling_steps": args.scaling_steps,
        "scenarios": args.scenarios,
    }


def cmd_simulate(args: argparse.Namespace) -> int:
    """
    Run the simulation grid and write aggregates, factor summaries,
    reporting rates, the MM/WM comparison and a manifest (plus raw
    records on request).
    """
    try:
        settings = load_settings(args.config, _simulate_overrides(args))
        grid = settings.grid()
    except (ConfigError, ValidationError) as exc:
        _print_error("invalid configuration", exc)
        return EXIT_INVALID_INPUT

    console.print(Rule("[cyan]median-meta simulation[/cyan]"))
    console.print(
        f"  {len(grid)} configs x {settings.replications} replicates, "
        f"seed {settings.seed}, {settings.workers} worker(s)"
    )
    done = {"n": 0}

    with console.status(
        "[cyan]Simulating...[/cyan]", spinner="dots"
    ) as status:

        def _progress(_config, _n_records: int) -> None:
            done["n"] += 1
            status.update(
                f"[cyan]Simulating... {done['n']}/{len(grid)}[/cyan]"
            )

        result = run_grid(
            grid,
            workers=settings.workers,
            alpha=settings.alpha,
            on_config_done=_progress,
        )

    out = settings.output_dir
    try:
        files = [
            write_aggregates(result.cells, out / AGGREGATES_FILE),
            write_factors(
                summarize_factors(result.records), out / FACTORS_FILE
            ),
            write_reporting(
                reporting_rates(result.records), out / REPORTING_FILE
            ),
            write_discrepancy(
                compare_weighted_unweighted(result.records),
                out / DISCREPANCY_FILE,
            ),
        ]
        if settings.write_records:
            files.append(
                write_records(result.records, out / RECORDS_FILE)
            )
        manifest = build_manifest(
            settings,
            n_configs=result.n_configs,
            n_records=len(result.records),
            dropped=result.dropped,
            elapsed_seconds=result.elapsed_seconds,
            files=[f.name for f in files],
        )
        files.append(write_manifest(manifest, out / MANIFEST_FILE))
    except OSError as exc:
        _print_error("cannot write results", exc)
        return EXIT_INVALID_INPUT

    table = Table(box=box.ROUNDED, border_style="cyan", show_header=False)
    table.add_column("key", style="dim")
    table.add_column("value", style="bold")
    table.add_row("Records", str(len(result.records)))
    table.add_row(
        "Cells",
        f"{sum(c.observed for c in result.cells)} observed / "
        f"{len(result.cells)}",
    )
    table.add_row("Elapsed", f"{result.elapsed_seconds:.1f}s")
    table.add_row("Output", str(out))
    console.print(table)
    return EXIT_OK


def _parse_tau2(raw: str) -> float:
    try:
        return float(Fraction(raw))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(
            f"not a number or fraction: {raw!r}"
        ) from exc


def cmd_plotdata(args: argparse.Namespace) -> int:
    """Write plot-ready CSVs from an aggregates file and/or a run report."""
    if not args.aggregates and not args.report:
        err_console.print(
            "[red]error:[/red] give --aggregates and/or --report"
        )
        return EXIT_INVALID_INPUT
    written: list[Path] = []
    try:
        if args.aggregates:
            written.extend(
                write_interaction_files(
                    args.aggregates,
                    args.out_dir,
                    tau2=args.tau2,
                    skew_level=SkewLevel(args.skew_level),
                    k=args.k,
                    size_median=args.size_median,
                )
            )
        if args.report:
            written.append(write_forest_file(args.report, args.out_dir))
    except (TableValidationError, ValidationError) as exc:
        _print_error("error", exc)
        return EXIT_INVALID_INPUT
    except OSError as exc:
        _print_error("cannot write plot data", exc)
        return EXIT_INVALID_INPUT
    for path in written:
        console.print(f"  [green]wrote[/green] {path}")
    return EXIT_OK


def cmd_settings(_args: argparse.Namespace) -> int:
    """
    Print the MEDIANMETA_* environment keys and their current values.

    Returns:
        0 always.
    """
    table = Table(
        title="median-meta settings (from .env / environment)",
        box=box.ROUNDED,
        border_style="cyan",
    )
    table.add_column("key", no_wrap=True)
    table.add_column("value")
    for key in [env_key(k) for k in SETTING_KEYS] + [LOG_LEVEL_ENV]:
        table.add_row(key, os.environ.get(key) or "(not set)")
    console.print(table)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medianmeta",
        description=(
            "Pool meta-analyses of medians and run the simulation "
            "study comparing median and transformation approaches."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", help="Command")

    pool_p = subparsers.add_parser(
        "pool", help="Pool a study-summary table"
    )
    pool_p.add_argument("table", help="CSV with id,n,mean,se,...")
    pool_p.add_argument(
        "--approach",
        action="append",
        choices=sorted(APPROACH_NAMES) + list(FAMILY_NAMES),
        help="Approach (repeatable); default: mm wm t1",
    )
    pool_p.add_argument(
        "--effect",
        choices=("fe", "re"),
        help="Variant for bare t1/t2/means (default: both)",
    )
    pool_p.add_argument(
        "--exclude",
        action="append",
        metavar="ID",
        help="Study id to leave out (repeatable)",
    )
    pool_p.add_argument(
        "--subgroup",
        choices=[s.value for s in Subgroup],
        default=Subgroup.ALL.value,
        help="Restrict to studies reporting quartiles or only a range",
    )
    pool_p.add_argument("--report", help="Write the run report JSON here")
    pool_p.set_defaults(func=cmd_pool)

    sim_p = subparsers.add_parser(
        "simulate", help="Run the simulation grid"
    )
    sim_p.add_argument("--config", help="key=value config file")
    sim_p.add_argument("--replications", type=int)
    sim_p.add_argument("--seed", type=int)
    sim_p.add_argument("--output-dir")
    sim_p.add_argument("--workers", type=int)
    sim_p.add_argument(
        "--records",
        action="store_true",
        default=None,
        help="Also write records.csv",
    )
    sim_p.add_argument("--k-studies", help="e.g. 15,50")
    sim_p.add_argument("--size-medians", help="e.g. 50,100")
    sim_p.add_argument("--combos", help="e.g. '1/4,1/4;4,4'")
    sim_p.add_argument("--scaling-steps", help="e.g. median_is_5")
    sim_p.add_argument("--scenarios", help="e.g. all_medians_q1q3,mixed")
    sim_p.set_defaults(func=cmd_simulate)

    plot_p = subparsers.add_parser(
        "plotdata", help="Write plot-ready CSVs"
    )
    plot_p.add_argument("--aggregates", help="aggregates.csv")
    plot_p.add_argument("--report", help="run report JSON from pool")
    plot_p.add_argument("--out-dir", default="plots")
    plot_p.add_argument("--tau2", type=_parse_tau2, default=0.25)
    plot_p.add_argument(
        "--skew-level",
        choices=[s.value for s in SkewLevel],
        default=SkewLevel.HIGH.value,
    )
    plot_p.add_argument("--k", type=int, default=50)
    plot_p.add_argument("--size-median", type=int, default=100)
    plot_p.set_defaults(func=cmd_plotdata)

    set_p = subparsers.add_parser(
        "settings", help="Show MEDIANMETA_* settings (env / .env)"
    )
    set_p.set_defaults(func=cmd_settings)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """
    CLI entry point: parse subcommand and dispatch.

    Returns:
        Exit code for the process.
    """
    _ensure_dotenv()
    configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
