"""
Study-summary tables: comma-separated UTF-8 with the header
id,n,mean,se,min,q1,median,q3,max (any subset after id, any order,
unknown columns ignored). An empty cell means the value was not
reported.
"""

from __future__ import annotations

import io
import math
from pathlib import Path
from typing import IO, Iterable

import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from median_meta.errors import TableValidationError
from median_meta.schema import QuantileSummary, StudySummary

CANONICAL_COLUMNS = (
    "id",
    "n",
    "mean",
    "se",
    "min",
    "q1",
    "median",
    "q3",
    "max",
)
VALUE_COLUMNS = CANONICAL_COLUMNS[1:]
QUANTILE_COLUMNS = ("min", "q1", "median", "q3", "max")


class StudyTableRow(BaseModel):
    """One table row, before it becomes a StudySummary."""

    id: str = Field(min_length=1)
    n: int | None = Field(default=None, ge=1)
    mean: float | None = None
    se: float | None = None
    min: float | None = None
    q1: float | None = None
    median: float | None = None
    q3: float | None = None
    max: float | None = None

    model_config = {"extra": "forbid", "frozen": True}

    def to_summary(self) -> StudySummary:
        quantiles = None
        if any(
            getattr(self, name) is not None for name in QUANTILE_COLUMNS
        ):
            if self.median is None:
                raise ValueError(
                    "quartiles or range reported without a median"
                )
            quantiles = QuantileSummary(
                min=self.min,
                q1=self.q1,
                median=self.median,
                q3=self.q3,
                max=self.max,
            )
        return StudySummary(
            id=self.id,
            n=self.n,
            mean=self.mean,
            se=self.se,
            quantiles=quantiles,
        )

    @classmethod
    def from_summary(cls, study: StudySummary) -> StudyTableRow:
        q = study.quantiles
        return cls(
            id=study.id,
            n=study.n,
            mean=study.mean,
            se=study.se,
            min=q.min if q else None,
            q1=q.q1 if q else None,
            median=q.median if q else None,
            q3=q.q3 if q else None,
            max=q.max if q else None,
        )


def _parse_number(raw: str, column: str) -> float | int:
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(f"{column}: not a finite number: {raw!r}")
    if column == "n":
        if not value.is_integer():
            raise ValueError(f"n must be a whole number, got {raw!r}")
        if value < 1:
            raise ValueError(f"n must be positive, got {raw!r}")
        return int(value)
    return value


def _validation_messages(exc: ValidationError) -> list[str]:
    out = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err.get("loc", ()))
        msg = err.get("msg", "invalid")
        out.append(f"{loc}: {msg}" if loc else msg)
    return out


def _read_frame(source: str | Path | IO[str]) -> pd.DataFrame:
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.is_file():
            raise TableValidationError([f"file not found: {path}"])
        text = path.read_text(encoding="utf-8")
    else:
        text = source.read()
    if not text.strip():
        raise TableValidationError(["empty table: no header row"])
    try:
        return pd.read_csv(
            io.StringIO(text),
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except (pd.errors.ParserError, ValueError) as exc:
        raise TableValidationError([f"malformed table: {exc}"]) from exc


def parse_study_table(
    source: str | Path | IO[str],
) -> list[StudyTableRow]:
    """
    Parse and validate a study table from a path or text stream.

    Every failing row is reported; rows are numbered from 1 after the
    header.

    Raises:
        TableValidationError: malformed header, unparsable numbers or
            rows breaking the study invariants.
    """
    frame = _read_frame(source)
    columns = [str(c).strip().lower() for c in frame.columns]
    if "id" not in columns:
        raise TableValidationError(["header has no 'id' column"])
    duplicated = sorted({c for c in columns if columns.count(c) > 1})
    if duplicated:
        raise TableValidationError(
            ["duplicate columns: " + ", ".join(duplicated)]
        )
    frame.columns = columns
    present = [c for c in VALUE_COLUMNS if c in columns]
    if not present:
        raise TableValidationError(
            ["header has none of: " + ", ".join(VALUE_COLUMNS)]
        )

    rows: list[StudyTableRow] = []
    diagnostics: list[str] = []
    seen: dict[str, int] = {}
    for index, record in enumerate(
        frame.to_dict(orient="records"), start=1
    ):
        raw_id = record.get("id", "")
        study_id = raw_id.strip() if isinstance(raw_id, str) else ""
        label = f"row {index}" + (f" ({study_id})" if study_id else "")
        if not study_id:
            diagnostics.append(f"{label}: missing id")
            continue
        if study_id in seen:
            diagnostics.append(
                f"{label}: duplicate id, first seen in row "
                f"{seen[study_id]}"
            )
            continue
        seen[study_id] = index
        values: dict[str, float | int | None] = {}
        problems = []
        for column in present:
            raw = record.get(column, "")
            # short rows come back as NaN even with dtype=str
            raw = raw.strip() if isinstance(raw, str) else ""
            if raw == "":
                values[column] = None
                continue
            try:
                values[column] = _parse_number(raw, column)
            except ValueError as exc:
                problems.append(f"{column}: {exc}")
        if problems:
            diagnostics.extend(f"{label}: {p}" for p in problems)
            continue
        try:
            row = StudyTableRow(id=study_id, **values)
            row.to_summary()
        except ValidationError as exc:
            diagnostics.extend(
                f"{label}: {m}" for m in _validation_messages(exc)
            )
            continue
        except ValueError as exc:
            diagnostics.append(f"{label}: {exc}")
            continue
        rows.append(row)

    if diagnostics:
        raise TableValidationError(diagnostics)
    if not rows:
        raise TableValidationError(["table has no study rows"])
    return rows


def load_studies(source: str | Path | IO[str]) -> list[StudySummary]:
    return [row.to_summary() for row in parse_study_table(source)]


def _format_cell(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def serialize_study_table(
    rows: Iterable[StudyTableRow], stream: IO[str] | None = None
) -> str:
    """Canonical CSV text for the rows (also written to stream if given)."""
    frame = pd.DataFrame(
        [
            {c: _format_cell(getattr(r, c)) for c in VALUE_COLUMNS}
            | {"id": r.id}
            for r in rows
        ],
        columns=list(CANONICAL_COLUMNS),
        dtype=str,
    )
    text = frame.to_csv(index=False, lineterminator="\n")
    if stream is not None:
        stream.write(text)
    return text
