"""
Exception hierarchy for median-meta.

Every error derives from MedianMetaError and, where the failure is about
a bad argument, also from ValueError so plain ``except ValueError``
callers keep working.
"""

from __future__ import annotations

from typing import Sequence


class MedianMetaError(Exception):
    """Base class for all median-meta errors."""


class DomainError(MedianMetaError, ValueError):
    """An argument lies outside the domain of the operation."""


class EmptyInputError(MedianMetaError, ValueError):
    """An operation received no values."""


class DegenerateSpreadError(MedianMetaError, ValueError):
    """Zero IQR, zero range or a constant sample."""


class InvalidWeightsError(MedianMetaError, ValueError):
    """Negative, non-finite or all-zero weights."""


class IneligibleStudyError(MedianMetaError, ValueError):
    """One or more studies cannot feed the requested approach."""

    def __init__(self, message: str, study_ids: Sequence[str]):
        super().__init__(message)
        self.study_ids = list(study_ids)


class NoEligibleStudiesError(MedianMetaError, ValueError):
    """Filtering left too few studies to pool."""


class TableValidationError(MedianMetaError, ValueError):
    """A study table failed validation; diagnostics name the rows."""

    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__(
            "study table rejected:\n  " + "\n  ".join(self.diagnostics)
        )


class ConfigError(MedianMetaError, ValueError):
    """Invalid simulation configuration key or value."""
