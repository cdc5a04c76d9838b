"""
Inverse-variance pooling of study means: fixed effect, DerSimonian-Laird
between-study variance and random effects, with Cochran's Q and I^2.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from median_meta.errors import (
    DomainError,
    EmptyInputError,
    InvalidWeightsError,
)
from median_meta.schema import PooledEstimate, Target
from median_meta.stats.distributions import Z_975, chi2_upper_tail


class _Fit(NamedTuple):
    point: float
    se: float
    q_stat: float
    weights_sum: float
    weights_sq_sum: float


def _as_arrays(
    effects: Sequence[float], variances: Sequence[float]
) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(effects, dtype=float)
    v = np.asarray(variances, dtype=float)
    if y.size == 0:
        raise EmptyInputError("no effects to pool")
    if y.shape != v.shape:
        raise DomainError(
            f"{y.size} effects but {v.size} variances"
        )
    if not np.all(np.isfinite(y)):
        raise DomainError("effects must be finite")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise InvalidWeightsError(
            "variances must be finite and strictly positive"
        )
    return y, v


def _weighted_fit(y: np.ndarray, w: np.ndarray) -> _Fit:
    sw = float(w.sum())
    point = float(np.dot(w, y) / sw)
    q_stat = float(np.dot(w, (y - point) ** 2))
    return _Fit(
        point=point,
        se=1.0 / math.sqrt(sw),
        q_stat=q_stat,
        weights_sum=sw,
        weights_sq_sum=float(np.dot(w, w)),
    )


def _i2(q_stat: float, k: int) -> float:
    if q_stat <= 0.0:
        return 0.0
    return max(0.0, (q_stat - (k - 1)) / q_stat) * 100.0


def _estimate(
    point: float,
    se: float,
    q_stat: float,
    k: int,
    tau2: float | None,
) -> PooledEstimate:
    half = Z_975 * se
    return PooledEstimate(
        target=Target.MEAN,
        point=point,
        ci_low=point - half,
        ci_high=point + half,
        se=se,
        tau2=tau2,
        q_stat=q_stat,
        q_pvalue=chi2_upper_tail(q_stat, k - 1) if k >= 2 else None,
        i2=_i2(q_stat, k),
        k=k,
    )


def pool_fixed(
    effects: Sequence[float], variances: Sequence[float]
) -> PooledEstimate:
    """Fixed-effect (1/v weighted) pooled mean."""
    y, v = _as_arrays(effects, variances)
    fit = _weighted_fit(y, 1.0 / v)
    return _estimate(fit.point, fit.se, fit.q_stat, y.size, None)


def dl_tau2(
    effects: Sequence[float], variances: Sequence[float]
) -> float:
    """DerSimonian-Laird moment estimate of the between-study variance."""
    y, v = _as_arrays(effects, variances)
    k = y.size
    if k < 2:
        raise DomainError(f"tau^2 needs k >= 2 studies, got {k}")
    fit = _weighted_fit(y, 1.0 / v)
    denom = fit.weights_sum - fit.weights_sq_sum / fit.weights_sum
    if denom <= 0.0:
        return 0.0
    return max(0.0, (fit.q_stat - (k - 1)) / denom)


def pool_random(
    effects: Sequence[float], variances: Sequence[float]
) -> PooledEstimate:
    """
    Random-effects pooled mean with 1/(v + tau^2) weights.

    q_stat and i2 describe the fixed-effect fit (the heterogeneity the
    tau^2 estimate was derived from).
    """
    y, v = _as_arrays(effects, variances)
    k = y.size
    if k < 2:
        raise DomainError(
            f"random effects needs k >= 2 studies, got {k}"
        )
    fixed = _weighted_fit(y, 1.0 / v)
    tau2 = dl_tau2(y, v)
    fit = _weighted_fit(y, 1.0 / (v + tau2))
    return _estimate(fit.point, fit.se, fixed.q_stat, k, tau2)
