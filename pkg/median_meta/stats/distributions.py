"""
Standard normal distribution functions and the chi-square tail used for
Cochran's Q. The cdf and quantile come from scipy.special (Cephes
erf/erfc based ndtr and ndtri), accurate to well below 1e-12.
"""

from __future__ import annotations

import math

from scipy import special
from scipy.stats import chi2

from median_meta.errors import DomainError

# 0.975 quantile of the standard normal (1.959964...)
Z_975 = float(special.ndtri(0.975))


def std_normal_cdf(x: float) -> float:
    """Phi(x) for finite x."""
    if not math.isfinite(x):
        raise DomainError(f"std_normal_cdf needs a finite x, got {x}")
    return float(special.ndtr(x))


def std_normal_quantile(p: float) -> float:
    """Phi^-1(p) for 0 < p < 1."""
    if not (0.0 < p < 1.0):
        raise DomainError(
            f"std_normal_quantile needs 0 < p < 1, got {p}"
        )
    return float(special.ndtri(p))


def chi2_upper_tail(statistic: float, df: int) -> float:
    """P(X >= statistic) for X ~ chi-square(df)."""
    if df < 1:
        raise DomainError(f"chi-square needs df >= 1, got {df}")
    return float(chi2.sf(max(statistic, 0.0), df))
