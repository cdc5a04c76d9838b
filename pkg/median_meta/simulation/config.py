"""
Simulation grid: scaling steps, reporting scenarios, SimConfig and the
default grid of 104 step-by-design cells crossed with all scenarios.
"""

from __future__ import annotations

import hashlib
import itertools
from enum import Enum
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, Field, model_validator

from median_meta.schema import Approach

K_STUDIES = (15, 50)
SIZE_MEDIANS = (50, 100)

# (tau2, sigma2) combinations of the simulation study
SIMULATED_COMBOS: tuple[tuple[float, float], ...] = (
    (1 / 16, 1 / 16),
    (1 / 16, 1 / 4),
    (1 / 4, 1 / 16),
    (1 / 4, 1 / 4),
    (1 / 4, 1),
    (1, 1 / 16),
    (1, 1 / 4),
    (1, 1),
    (1, 4),
    (4, 1 / 16),
    (4, 1 / 4),
    (4, 1),
    (4, 4),
)

DEFAULT_REPLICATIONS = 1000
DEFAULT_SEED = 20170101


class ScalingStep(str, Enum):
    MEAN_IS_5 = "MeanIs5"
    MEDIAN_IS_5 = "MedianIs5"


class Scenario(str, Enum):
    ALL_MEDIANS_Q1Q3 = "AllMediansQ1Q3"
    ALL_MEDIANS_MINMAX = "AllMediansMinMax"
    ALL_MEANS = "AllMeans"
    MIXED = "Mixed"


def is_simulated_combo(tau2: float, sigma2: float) -> bool:
    return any(
        abs(tau2 - t) < 1e-12 and abs(sigma2 - s) < 1e-12
        for t, s in SIMULATED_COMBOS
    )


def format_variance(value: float) -> str:
    """1/16, 1/4, 1, 4 style label for a variance."""
    frac = Fraction(value).limit_denominator(64)
    if abs(float(frac) - value) > 1e-12:
        return f"{value:g}"
    return str(frac)


class SimConfig(BaseModel):
    """One cell of the simulation grid."""

    k_studies: int = Field(ge=1)
    size_median: int
    tau2: float = Field(ge=0)
    sigma2: float = Field(ge=0)
    scaling_step: ScalingStep
    scenario: Scenario
    replications: int = Field(default=DEFAULT_REPLICATIONS, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0)

    model_config = {"extra": "forbid", "frozen": True}

    @model_validator(mode="after")
    def _check_design(self) -> SimConfig:
        if self.size_median not in SIZE_MEDIANS:
            raise ValueError(
                f"size_median must be one of {SIZE_MEDIANS}, "
                f"got {self.size_median}"
            )
        if not is_simulated_combo(self.tau2, self.sigma2):
            raise ValueError(
                f"(tau2, sigma2) = ({self.tau2}, {self.sigma2}) is not "
                "one of the 13 simulated combinations"
            )
        return self

    @property
    def design(self) -> tuple[int, int, float, float]:
        """Data-generation parameters shared by every step/scenario."""
        return (self.k_studies, self.size_median, self.tau2, self.sigma2)

    @property
    def design_id(self) -> int:
        """Stable 32-bit digest of the design tuple."""
        key = "|".join(
            [
                str(self.k_studies),
                str(self.size_median),
                repr(float(self.tau2)),
                repr(float(self.sigma2)),
            ]
        )
        digest = hashlib.blake2b(key.encode(), digest_size=4).digest()
        return int.from_bytes(digest, "big")

    @property
    def label(self) -> str:
        return (
            f"k={self.k_studies} n~{self.size_median} "
            f"tau2={format_variance(self.tau2)} "
            f"sigma2={format_variance(self.sigma2)} "
            f"{self.scaling_step.value}/{self.scenario.value}"
        )

    def data_rng(self, replicate: int) -> np.random.Generator:
        """Stream that draws sizes, random effects and outcomes."""
        return _replicate_rng(self, replicate, 0)

    def reporting_rng(self, replicate: int) -> np.random.Generator:
        """Stream for the mixed scenario's spread coin flips."""
        return _replicate_rng(self, replicate, 1)


def _replicate_rng(
    config: SimConfig, replicate: int, stream: int
) -> np.random.Generator:
    seq = np.random.SeedSequence(
        config.seed, spawn_key=(config.design_id, replicate, stream)
    )
    return np.random.default_rng(seq)


_SCENARIO_APPROACHES: dict[Scenario, tuple[Approach, ...]] = {
    Scenario.ALL_MEDIANS_Q1Q3: (Approach.T1_FE, Approach.T1_RE),
    Scenario.ALL_MEDIANS_MINMAX: (Approach.T2_FE, Approach.T2_RE),
    Scenario.ALL_MEANS: (Approach.MEANS_FE, Approach.MEANS_RE),
    Scenario.MIXED: (
        Approach.T1_FE,
        Approach.T1_RE,
        Approach.T2_FE,
        Approach.T2_RE,
    ),
}


def approaches_for(config: SimConfig) -> tuple[Approach, ...]:
    """
    Approaches evaluated on a config: median approaches on MedianIs5
    data, the scenario's mean approaches on MeanIs5 data.
    """
    if config.scaling_step is ScalingStep.MEDIAN_IS_5:
        return (Approach.MM, Approach.WM)
    return _SCENARIO_APPROACHES[config.scenario]


def default_grid(
    *,
    k_studies: tuple[int, ...] | list[int] = K_STUDIES,
    size_medians: tuple[int, ...] | list[int] = SIZE_MEDIANS,
    combos: tuple[tuple[float, float], ...]
    | list[tuple[float, float]] = SIMULATED_COMBOS,
    scaling_steps: tuple[ScalingStep, ...]
    | list[ScalingStep] = tuple(ScalingStep),
    scenarios: tuple[Scenario, ...] | list[Scenario] = tuple(Scenario),
    replications: int = DEFAULT_REPLICATIONS,
    seed: int = DEFAULT_SEED,
) -> list[SimConfig]:
    """Cross every factor; the defaults give 104 x 4 = 416 configs."""
    return [
        SimConfig(
            k_studies=k,
            size_median=size,
            tau2=tau2,
            sigma2=sigma2,
            scaling_step=step,
            scenario=scenario,
            replications=replications,
            seed=seed,
        )
        for k, size, (tau2, sigma2), step, scenario in itertools.product(
            k_studies, size_medians, combos, scaling_steps, scenarios
        )
    ]
