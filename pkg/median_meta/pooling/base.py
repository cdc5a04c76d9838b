"""
Base pooler interface. Each approach family (transformation, reported
means, medians) implements this: it turns StudySummary records into the
numbers its pooling formula needs, then pools them.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

from loguru import logger

from median_meta.errors import NoEligibleStudiesError

if TYPE_CHECKING:
    from median_meta.schema import (
        Approach,
        PooledEstimate,
        StudySummary,
    )


@dataclass
class PoolingInputs:
    """Per-study values an approach pools, plus the studies it dropped."""

    approach: Approach
    study_ids: list[str] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    variances: list[float] = field(default_factory=list)
    sizes: list[int] = field(default_factory=list)
    dropped: dict[str, str] = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.values)


class Pooler(ABC):
    """Abstract pooler: prepare inputs for an approach, then pool them."""

    @property
    @abstractmethod
    def family_name(self) -> str:
        """e.g. 'transformation', 'means', 'median'."""
        ...

    @abstractmethod
    def prepare(
        self,
        studies: Sequence[StudySummary],
        approach: Approach,
        drop_unusable: bool = False,
    ) -> PoolingInputs:
        """
        Collect the values the approach pools. Studies the approach can
        never use raise IneligibleStudyError unless drop_unusable is set,
        in which case they are recorded in PoolingInputs.dropped.
        """
        ...

    @abstractmethod
    def pool(self, inputs: PoolingInputs) -> PooledEstimate:
        ...

    def min_studies(self, approach: Approach) -> int:
        return 2 if approach.random_effects else 1

    def run(
        self,
        studies: Sequence[StudySummary],
        approach: Approach,
        drop_unusable: bool = False,
    ) -> tuple[PooledEstimate, PoolingInputs]:
        if approach.family != self.family_name:
            raise ValueError(
                f"{approach.value} is a {approach.family} approach, "
                f"not {self.family_name}"
            )
        inputs = self.prepare(studies, approach, drop_unusable)
        for study_id, reason in inputs.dropped.items():
            logger.debug(
                "{}: dropped study {} ({})",
                approach.value,
                study_id,
                reason,
            )
        needed = self.min_studies(approach)
        if inputs.k < needed:
            raise NoEligibleStudiesError(
                f"{approach.value} needs at least {needed} eligible "
                f"studies, {inputs.k} left after filtering"
            )
        return self.pool(inputs), inputs
