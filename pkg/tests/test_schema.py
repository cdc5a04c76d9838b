"""
Unit tests for median_meta.schema (approaches, study summaries, pooled
estimates).
"""

from __future__ import annotations

import pytest
from pydantic import ValidationError

from median_meta.schema import (
    Approach,
    PooledEstimate,
    QuantileSummary,
    SpreadType,
    StudySummary,
    Target,
)


class TestApproach:
    """Test Approach properties."""

    @pytest.mark.parametrize(
        ("approach", "target", "family", "random"),
        [
            (Approach.T1_FE, Target.MEAN, "transformation", False),
            (Approach.T2_RE, Target.MEAN, "transformation", True),
            (Approach.MEANS_RE, Target.MEAN, "means", True),
            (Approach.MM, Target.MEDIAN, "median", False),
            (Approach.WM, Target.MEDIAN, "median", False),
        ],
    )
    def test_properties(self, approach, target, family, random):
        assert approach.target is target
        assert approach.family == family
        assert approach.random_effects is random

    def test_eight_approaches(self):
        assert len(Approach) == 8


class TestQuantileSummary:
    """Test QuantileSummary ordering."""

    def test_partial_summary(self):
        q = QuantileSummary(median=3.0, q3=4.0)
        assert not q.has_quartiles
        assert not q.has_range

    def test_out_of_order(self):
        with pytest.raises(ValidationError):
            QuantileSummary(min=2.0, median=1.0)

    def test_equal_values_allowed(self):
        q = QuantileSummary(min=1.0, q1=1.0, median=1.0, q3=1.0, max=1.0)
        assert q.has_quartiles and q.has_range

    def test_not_finite(self):
        with pytest.raises(ValidationError):
            QuantileSummary(median=float("nan"))


class TestStudySummary:
    """Test StudySummary invariants and spread precedence."""

    def test_needs_median_or_mean_se(self):
        with pytest.raises(ValidationError):
            StudySummary(id="a", n=10, mean=2.0)

    def test_n_positive(self):
        with pytest.raises(ValidationError):
            StudySummary(
                id="a", n=0, quantiles=QuantileSummary(median=1.0)
            )

    def test_spread_precedence(self):
        both = StudySummary(
            id="a",
            n=10,
            mean=2.0,
            se=0.1,
            quantiles=QuantileSummary(
                min=0.0, q1=1.0, median=2.0, q3=3.0, max=4.0
            ),
        )
        assert both.spread_type is SpreadType.Q1Q3
        ranged = StudySummary(
            id="b",
            quantiles=QuantileSummary(min=0.0, median=2.0, max=4.0),
        )
        assert ranged.spread_type is SpreadType.MINMAX
        means = StudySummary(id="c", mean=2.0, se=0.1)
        assert means.spread_type is SpreadType.MEAN_SE
        assert means.median is None
        bare = StudySummary(
            id="d", quantiles=QuantileSummary(median=2.0)
        )
        assert bare.spread_type is SpreadType.NONE


class TestPooledEstimate:
    """Test PooledEstimate."""

    def test_interval_must_contain_point(self):
        with pytest.raises(ValidationError):
            PooledEstimate(
                target=Target.MEAN,
                point=5.0,
                ci_low=1.0,
                ci_high=2.0,
                k=3,
            )

    def test_covers(self):
        est = PooledEstimate(
            target=Target.MEDIAN,
            point=2.0,
            ci_low=1.0,
            ci_high=3.0,
            k=3,
        )
        assert est.covers(1.0)
        assert est.covers(3.0)
        assert not est.covers(3.5)
