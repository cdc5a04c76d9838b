"""
Simulation settings: defaults reproduce the full simulation grid and are
overridden, in increasing precedence, by MEDIANMETA_* environment
variables, a flat key=value config file and command-line flags.

Config file example:

    replications=200
    seed=7
    k_studies=15,50
    combos=1/4,1/4;4,4
    scenarios=all_medians_q1q3,mixed
"""

from __future__ import annotations

import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping

from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError, field_validator

from median_meta.errors import ConfigError
from median_meta.simulation.config import (
    DEFAULT_REPLICATIONS,
    DEFAULT_SEED,
    K_STUDIES,
    SIMULATED_COMBOS,
    SIZE_MEDIANS,
    Scenario,
    ScalingStep,
    SimConfig,
    default_grid,
    is_simulated_combo,
)
from median_meta.stats.normality import DEFAULT_ALPHA

ENV_PREFIX = "MEDIANMETA_"
LOG_LEVEL_ENV = "MEDIANMETA_LOG_LEVEL"
DEFAULT_LOG_LEVEL = "INFO"


class SimulationSettings(BaseModel):
    """Everything needed to reproduce a simulation run."""

    k_studies: list[int] = Field(default_factory=lambda: list(K_STUDIES))
    size_medians: list[int] = Field(
        default_factory=lambda: list(SIZE_MEDIANS)
    )
    combos: list[tuple[float, float]] = Field(
        default_factory=lambda: list(SIMULATED_COMBOS)
    )
    scaling_steps: list[ScalingStep] = Field(
        default_factory=lambda: list(ScalingStep)
    )
    scenarios: list[Scenario] = Field(
        default_factory=lambda: list(Scenario)
    )
    replications: int = Field(default=DEFAULT_REPLICATIONS, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    output_dir: Path = Path("results")
    workers: int = Field(default=1, ge=1)
    write_records: bool = False
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0, lt=1)

    model_config = {"extra": "forbid"}

    @field_validator(
        "k_studies",
        "size_medians",
        "combos",
        "scaling_steps",
        "scenarios",
    )
    @classmethod
    def _not_empty(cls, value: list) -> list:
        if not value:
            raise ValueError("must not be empty")
        return value

    @field_validator("k_studies")
    @classmethod
    def _positive_k(cls, value: list[int]) -> list[int]:
        if any(k < 1 for k in value):
            raise ValueError("study counts must be >= 1")
        return value

    @field_validator("size_medians")
    @classmethod
    def _known_sizes(cls, value: list[int]) -> list[int]:
        bad = [s for s in value if s not in SIZE_MEDIANS]
        if bad:
            raise ValueError(
                f"median study sizes must be in {SIZE_MEDIANS}, got {bad}"
            )
        return value

    @field_validator("combos")
    @classmethod
    def _known_combos(
        cls, value: list[tuple[float, float]]
    ) -> list[tuple[float, float]]:
        bad = [c for c in value if not is_simulated_combo(*c)]
        if bad:
            raise ValueError(
                f"not simulated (tau2, sigma2) combinations: {bad}"
            )
        return value

    def grid(self) -> list[SimConfig]:
        return default_grid(
            k_studies=self.k_studies,
            size_medians=self.size_medians,
            combos=self.combos,
            scaling_steps=self.scaling_steps,
            scenarios=self.scenarios,
            replications=self.replications,
            seed=self.seed,
        )


def _normalize(name: str) -> str:
    return name.strip().lower().replace("_", "").replace("-", "")


def _parse_int_list(raw: str) -> list[int]:
    return [int(part) for part in raw.split(",") if part.strip()]


def _parse_fraction(raw: str) -> float:
    return float(Fraction(raw.strip()))


def parse_combos(raw: str) -> list[tuple[float, float]]:
    """'1/4,1/16;1,1' -> [(0.25, 0.0625), (1.0, 1.0)]"""
    combos = []
    for pair in raw.split(";"):
        if not pair.strip():
            continue
        parts = pair.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'tau2,sigma2', got {pair!r}")
        combos.append(
            (_parse_fraction(parts[0]), _parse_fraction(parts[1]))
        )
    return combos


def _enum_parser(enum_cls: type) -> Callable[[str], list]:
    lookup = {}
    for member in enum_cls:
        lookup[_normalize(member.value)] = member
        lookup[_normalize(member.name)] = member

    def parse(raw: str) -> list:
        out = []
        for part in raw.split(","):
            if not part.strip():
                continue
            key = _normalize(part)
            if key not in lookup:
                choices = ", ".join(m.value for m in enum_cls)
                raise ValueError(
                    f"unknown value {part.strip()!r} (choose from "
                    f"{choices})"
                )
            out.append(lookup[key])
        return out

    return parse


def parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


_PARSERS: dict[str, Callable[[str], Any]] = {
    "k_studies": _parse_int_list,
    "size_medians": _parse_int_list,
    "combos": parse_combos,
    "scaling_steps": _enum_parser(ScalingStep),
    "scenarios": _enum_parser(Scenario),
    "replications": int,
    "seed": int,
    "output_dir": Path,
    "workers": int,
    "write_records": parse_bool,
    "alpha": float,
}

SETTING_KEYS = tuple(_PARSERS)


def env_key(name: str) -> str:
    return ENV_PREFIX + name.upper()


def parse_setting(name: str, raw: str) -> Any:
    """Parse one raw string value for a settings key."""
    key = name.strip().lower()
    if key not in _PARSERS:
        raise ConfigError(
            f"unknown setting {name!r} (known: "
            + ", ".join(SETTING_KEYS)
            + ")"
        )
    try:
        return _PARSERS[key](raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid value for {key}: {exc}") from exc


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Parsed values of a key=value config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, Any] = {}
    for key, raw in dotenv_values(path).items():
        if raw is None:
            raise ConfigError(f"{path}: {key!r} has no value")
        values[key.strip().lower()] = parse_setting(key, raw)
    return values


def read_environment(
    environ: Mapping[str, str] | None = None,
) -> dict[str, Any]:
    environ = os.environ if environ is None else environ
    values: dict[str, Any] = {}
    for key in SETTING_KEYS:
        raw = environ.get(env_key(key))
        if raw is not None and raw.strip():
            values[key] = parse_setting(key, raw)
    return values


def load_settings(
    config_file: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> SimulationSettings:
    """
    Merge defaults, environment, config file and overrides (in that
    order of precedence). String overrides go through the same parsers
    as file values; None overrides are ignored.

    Raises:
        ConfigError: unknown key, unparsable or out-of-range value.
    """
    values = read_environment(environ)
    if config_file is not None:
        values.update(read_config_file(config_file))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if isinstance(value, str):
            value = parse_setting(key, value)
        elif key not in _PARSERS:
            raise ConfigError(f"unknown setting {key!r}")
        values[key] = value
    try:
        return SimulationSettings(**values)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def log_level(environ: Mapping[str, str] | None = None) -> str:
    environ = os.environ if environ is None else environ
    return (
        environ.get(LOG_LEVEL_ENV, DEFAULT_LOG_LEVEL).strip().upper()
        or DEFAULT_LOG_LEVEL
    )
