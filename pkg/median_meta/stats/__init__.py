"""Numeric substrate: distributions, quantiles, skewness, normality."""

from median_meta.stats.distributions import (
    Z_975,
    chi2_upper_tail,
    std_normal_cdf,
    std_normal_quantile,
)
from median_meta.stats.normality import (
    DEFAULT_ALPHA,
    ShapiroWilkResult,
    looks_normal,
    shapiro_wilk,
)
from median_meta.stats.quantiles import (
    WeightedSample,
    sample_quantile,
    weighted_quantile,
)
from median_meta.stats.skewness import (
    bowley_skewness,
    classify_skew,
    mean_bowley_skewness,
)

__all__ = [
    "DEFAULT_ALPHA",
    "ShapiroWilkResult",
    "WeightedSample",
    "Z_975",
    "bowley_skewness",
    "chi2_upper_tail",
    "classify_skew",
    "looks_normal",
    "mean_bowley_skewness",
    "sample_quantile",
    "shapiro_wilk",
    "std_normal_cdf",
    "std_normal_quantile",
    "weighted_quantile",
]
