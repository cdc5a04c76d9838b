"""
Scenario dispatcher: decides how each study's report feeds each
approach and routes it to the right pooler.

- MM/WM pool the reported median, or the reported mean treated as a
  median. WM drops studies without n.
- T1_*/T2_* pool reported means directly and estimated means for
  studies reporting a median (T1 from quartiles, T2 from a range; the
  approach's own estimator is preferred, the other is the fallback).
- MEANS_* require a reported mean+se from every study.
"""

from __future__ import annotations

from typing import Sequence

from loguru import logger

from median_meta.errors import (
    EmptyInputError,
    IneligibleStudyError,
)
from median_meta.estimators import estimate_mean_sd
from median_meta.pooling.base import Pooler, PoolingInputs
from median_meta.pooling.inverse_variance import (
    pool_fixed,
    pool_random,
)
from median_meta.pooling.median import pool_median_mm, pool_median_wm
from median_meta.schema import (
    Approach,
    EstimateSource,
    PooledEstimate,
    StudySummary,
)


def _pool_inverse_variance(inputs: PoolingInputs) -> PooledEstimate:
    if inputs.approach.random_effects:
        return pool_random(inputs.values, inputs.variances)
    return pool_fixed(inputs.values, inputs.variances)


class TransformationPooler(Pooler):
    """T1_* and T2_*: estimated means from medians, inverse variance."""

    @property
    def family_name(self) -> str:
        return "transformation"

    def prepare(
        self,
        studies: Sequence[StudySummary],
        approach: Approach,
        drop_unusable: bool = False,
    ) -> PoolingInputs:
        preference = (
            EstimateSource.T2
            if approach.value.startswith("T2")
            else EstimateSource.T1
        )
        inputs = PoolingInputs(approach=approach)
        unusable: list[str] = []
        for study in studies:
            try:
                est = estimate_mean_sd(study, preference)
            except IneligibleStudyError as exc:
                unusable.append(study.id)
                inputs.dropped[study.id] = str(exc)
                continue
            inputs.study_ids.append(study.id)
            inputs.values.append(est.mean)
            inputs.variances.append(est.se**2)
            if study.n is not None:
                inputs.sizes.append(study.n)
        if unusable and not drop_unusable:
            raise IneligibleStudyError(
                f"{approach.value} cannot use studies: "
                + ", ".join(unusable),
                unusable,
            )
        return inputs

    def pool(self, inputs: PoolingInputs) -> PooledEstimate:
        return _pool_inverse_variance(inputs)


class MeansPooler(Pooler):
    """MEANS_*: reported sample means and their standard errors."""

    @property
    def family_name(self) -> str:
        return "means"

    def prepare(
        self,
        studies: Sequence[StudySummary],
        approach: Approach,
        drop_unusable: bool = False,
    ) -> PoolingInputs:
        # never drops: a study without mean+se is always an error
        missing = [s.id for s in studies if not s.has_mean_se]
        if missing:
            raise IneligibleStudyError(
                f"{approach.value} needs a reported mean and se; "
                "missing for: " + ", ".join(missing),
                missing,
            )
        inputs = PoolingInputs(approach=approach)
        for study in studies:
            inputs.study_ids.append(study.id)
            inputs.values.append(study.mean)
            inputs.variances.append(study.se**2)
            if study.n is not None:
                inputs.sizes.append(study.n)
        return inputs

    def pool(self, inputs: PoolingInputs) -> PooledEstimate:
        return _pool_inverse_variance(inputs)


class MedianPooler(Pooler):
    """MM and WM over study medians (means stand in for missing ones)."""

    @property
    def family_name(self) -> str:
        return "median"

    def prepare(
        self,
        studies: Sequence[StudySummary],
        approach: Approach,
        drop_unusable: bool = False,
    ) -> PoolingInputs:
        inputs = PoolingInputs(approach=approach)
        weighted = approach is Approach.WM
        for study in studies:
            value = (
                study.median
                if study.median is not None
                else study.mean
            )
            if weighted and study.n is None:
                inputs.dropped[study.id] = "no number of subjects"
                continue
            inputs.study_ids.append(study.id)
            inputs.values.append(value)
            if study.n is not None:
                inputs.sizes.append(study.n)
        if weighted and inputs.dropped:
            logger.warning(
                "WM dropped {} studies without n: {}",
                len(inputs.dropped),
                ", ".join(inputs.dropped),
            )
        return inputs

    def pool(self, inputs: PoolingInputs) -> PooledEstimate:
        if inputs.approach is Approach.WM:
            return pool_median_wm(inputs.values, inputs.sizes)
        return pool_median_mm(inputs.values)


_TRANSFORMATION = TransformationPooler()
_MEANS = MeansPooler()
_MEDIAN = MedianPooler()

_POOLERS_BY_APPROACH: dict[Approach, Pooler] = {
    Approach.T1_FE: _TRANSFORMATION,
    Approach.T1_RE: _TRANSFORMATION,
    Approach.T2_FE: _TRANSFORMATION,
    Approach.T2_RE: _TRANSFORMATION,
    Approach.MEANS_FE: _MEANS,
    Approach.MEANS_RE: _MEANS,
    Approach.MM: _MEDIAN,
    Approach.WM: _MEDIAN,
}


def pooler_for(approach: Approach) -> Pooler:
    return _POOLERS_BY_APPROACH[approach]


def resolve_inputs(
    studies: Sequence[StudySummary],
    approach: Approach,
    drop_unusable: bool = False,
) -> PoolingInputs:
    """The values (and dropped studies) apply_approach would pool."""
    if not studies:
        raise EmptyInputError("no studies to pool")
    return pooler_for(approach).prepare(studies, approach, drop_unusable)


def apply_approach(
    studies: Sequence[StudySummary],
    approach: Approach,
    drop_unusable: bool = False,
) -> PooledEstimate:
    """Pool the studies with the given approach."""
    estimate, _ = apply_approach_detailed(
        studies, approach, drop_unusable
    )
    return estimate


def apply_approach_detailed(
    studies: Sequence[StudySummary],
    approach: Approach,
    drop_unusable: bool = False,
) -> tuple[PooledEstimate, PoolingInputs]:
    if not studies:
        raise EmptyInputError("no studies to pool")
    return pooler_for(approach).run(studies, approach, drop_unusable)
