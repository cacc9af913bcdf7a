"""Configuration types for the XY chain, its disorder ensemble and parameter sweeps.

All energies (fields, temperatures) are in units of the coupling ``J``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

import yaml


class ConfigError(ValueError):
    """Raised when a configuration violates one of the type invariants."""


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


class Regime(str, enum.Enum):
    UNIFORM_ZERO_T = "uniform_zero_t"
    UNIFORM_FINITE_T = "uniform_finite_t"
    RANDOM_ZERO_T = "random_zero_t"


class SigmaConvention(str, enum.Enum):
    """How the width ``a`` is read for the Gaussian (q = 1) field distribution.

    ``literal`` uses the density exp(-h^2/a^2), i.e. standard deviation a/sqrt(2).
    ``prose`` rescales it so the standard deviation is ``a``.
    """

    LITERAL = "literal"
    PROSE = "prose"


@dataclass(frozen=True)
class ChainSpec:
    n_sites: int
    coupling: float = 1.0
    uniform_field: float = 0.0
    temperature: float = 0.0
    boundary: Boundary = Boundary.PERIODIC

    @property
    def beta(self) -> float:
        return float("inf") if self.temperature == 0 else 1.0 / self.temperature

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    def with_field(self, h: float) -> "ChainSpec":
        return replace(self, uniform_field=float(h))


@dataclass(frozen=True)
class DisorderSpec:
    q: float = 1.0
    scale_a: float = 0.0
    n_samples: int = 1000
    master_seed: int = 20070101
    sigma_convention: SigmaConvention = SigmaConvention.LITERAL


@dataclass(frozen=True)
class SweepSpec:
    h_grid: tuple[float, ...]
    r_max: int = 5
    regime: Regime = Regime.UNIFORM_ZERO_T


@dataclass(frozen=True)
class Config:
    chain: ChainSpec
    sweep: SweepSpec
    disorder: DisorderSpec = field(default_factory=DisorderSpec)


def validate_chain(chain: ChainSpec) -> ChainSpec:
    if int(chain.n_sites) != chain.n_sites or chain.n_sites < 2:
        raise ConfigError(f"n_sites must be an integer >= 2, got {chain.n_sites!r}")
    if not chain.coupling > 0:
        raise ConfigError(f"coupling must be > 0 (ferromagnetic), got {chain.coupling!r}")
    if not chain.temperature >= 0:
        raise ConfigError(f"temperature must be >= 0, got {chain.temperature!r}")
    if not isinstance(chain.boundary, Boundary):
        raise ConfigError(f"unknown boundary {chain.boundary!r}")
    return chain


def validate_disorder(disorder: DisorderSpec) -> DisorderSpec:
    if not 1.0 <= disorder.q < 3.0:
        raise ConfigError(f"q must lie in [1, 3), got {disorder.q!r}")
    if not disorder.scale_a >= 0:
        raise ConfigError(f"scale_a must be >= 0, got {disorder.scale_a!r}")
    if int(disorder.n_samples) != disorder.n_samples or disorder.n_samples < 1:
        raise ConfigError(f"n_samples must be a positive integer, got {disorder.n_samples!r}")
    if not 0 <= disorder.master_seed < 2**64:
        raise ConfigError(f"master_seed must be a 64-bit unsigned integer, got {disorder.master_seed!r}")
    return disorder


def validate_sweep(sweep: SweepSpec, n_sites: int | None = None) -> SweepSpec:
    grid = sweep.h_grid
    if len(grid) == 0:
        raise ConfigError("h_grid must not be empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("h_grid must be strictly increasing")
    if sweep.r_max < 1:
        raise ConfigError(f"r_max must be >= 1, got {sweep.r_max}")
    if n_sites is not None and not sweep.r_max < n_sites / 2:
        raise ConfigError(f"r_max={sweep.r_max} too large: need r_max < n_sites/2 = {n_sites / 2}")
    return sweep


def validate(config: Config) -> Config:
    """Check every invariant of a full configuration; returns it unchanged if valid."""
    chain = validate_chain(config.chain)
    validate_disorder(config.disorder)
    sweep = validate_sweep(config.sweep, chain.n_sites)
    if sweep.regime is Regime.UNIFORM_FINITE_T and chain.temperature <= 0:
        raise ConfigError("regime uniform_finite_t requires temperature > 0")
    if sweep.regime in (Regime.UNIFORM_ZERO_T, Regime.RANDOM_ZERO_T) and chain.temperature != 0:
        raise ConfigError(f"regime {sweep.regime.value} requires temperature = 0")
    return config


def h_grid(h_min: float, h_max: float, h_steps: int) -> tuple[float, ...]:
    """Evenly spaced grid, rounded so that nominal points like 1.0 land exactly."""
    if h_steps < 1:
        raise ConfigError("h_steps must be >= 1")
    if h_steps == 1:
        return (float(h_min),)
    step = (h_max - h_min) / (h_steps - 1)
    return tuple(round(h_min + k * step, 12) for k in range(h_steps))


def _coerce(cls, raw: Mapping[str, Any], converters: Mapping[str, Any]):
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        conv = converters.get(key)
        try:
            kwargs[key] = conv(value) if conv else value
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    return cls(**kwargs)


def config_from_mapping(raw: Mapping[str, Any]) -> Config:
    """Build a validated :class:`Config` from nested ``chain``/``disorder``/``sweep`` sections."""
    raw = dict(raw)
    unknown = set(raw) - {"chain", "disorder", "sweep"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    chain = _coerce(
        ChainSpec,
        raw.get("chain", {}),
        {"n_sites": int, "coupling": float, "uniform_field": float,
         "temperature": float, "boundary": Boundary},
    )
    disorder = _coerce(
        DisorderSpec,
        raw.get("disorder", {}),
        {"q": float, "scale_a": float, "n_samples": int, "master_seed": int,
         "sigma_convention": SigmaConvention},
    )
    sweep_raw = dict(raw.get("sweep", {}))
    if "h_grid" not in sweep_raw and {"h_min", "h_max", "h_steps"} <= set(sweep_raw):
        sweep_raw["h_grid"] = h_grid(
            float(sweep_raw.pop("h_min")), float(sweep_raw.pop("h_max")), int(sweep_raw.pop("h_steps"))
        )
    sweep = _coerce(
        SweepSpec,
        sweep_raw,
        {"h_grid": lambda xs: tuple(float(x) for x in xs), "r_max": int, "regime": Regime},
    )
    return validate(Config(chain=chain, sweep=sweep, disorder=disorder))


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a YAML configuration file into a nested dict (not yet validated)."""
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data

