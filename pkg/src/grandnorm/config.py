"""
Run configuration for grandnorm.

Every group has built-in defaults, so a YAML file only needs the keys it changes:

    tolerances: {luxemburg: 1e-12, morrey: 1e-10, certification: 1e-9, trend: 0.05}
    grid: {count: 64, offset: 0.001, dyadic_levels: 20}
    density: {thresholds: [2, 4, 8, 16, 32, 64], resolve_depth: 8}
    verify: {seed: 42, instances: 1000}
    logging: {level: WARNING, numpy_errors: ignore}
    limits: {threads: 4}

The environment variable GRANDNORM_THREADS overrides `limits.threads`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, MutableMapping

import yaml

from grandnorm.utils.logging import NUMPY_ERROR_MODES

THREADS_ENV = "GRANDNORM_THREADS"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigError(ValueError):
    """Raised when the YAML configuration holds invalid values."""


def _positive_float(data: Mapping[str, Any], key: str, default: float, section: str) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int | float) or not math.isfinite(value) or value <= 0:
        raise ConfigError(f"`{section}.{key}` must be a positive number.")
    return float(value)


def _positive_int(data: Mapping[str, Any], key: str, default: int | None, section: str) -> int | None:
    value = data.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise ConfigError(f"`{section}.{key}` must be a positive integer.")
    return value


@dataclass(slots=True)
class ToleranceSettings:
    luxemburg: float = 1e-12
    morrey: float = 1e-10
    certification: float = 1e-9
    trend: float = 0.05
    radius_bump: float = 1e-9

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ToleranceSettings":
        defaults = cls()
        values = {
            name: _positive_float(data, name, getattr(defaults, name), "tolerances")
            for name in ("luxemburg", "morrey", "certification", "trend", "radius_bump")
        }
        if values["radius_bump"] >= 1e-3:
            raise ConfigError("`tolerances.radius_bump` must be below 1e-3.")
        return cls(**values)


@dataclass(slots=True)
class GridSettings:
    count: int = 64
    offset: float = 1e-3
    dyadic_levels: int = 20

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "GridSettings":
        count = _positive_int(data, "count", 64, "grid")
        if count < 2:
            raise ConfigError("`grid.count` must be at least 2.")
        offset = _positive_float(data, "offset", 1e-3, "grid")
        if offset >= 0.5:
            raise ConfigError("`grid.offset` must be below 0.5.")
        dyadic_levels = data.get("dyadic_levels", 20)
        if isinstance(dyadic_levels, bool) or not isinstance(dyadic_levels, int) or dyadic_levels < 0:
            raise ConfigError("`grid.dyadic_levels` must be a nonnegative integer.")
        return cls(count=count, offset=offset, dyadic_levels=dyadic_levels)


@dataclass(slots=True)
class DensitySettings:
    thresholds: tuple[float, ...] = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
    resolve_depth: float = 8.0  # smallest readable shift is resolve_depth / depth
    tail_scale: float = 0.25  # a level reads tails up to exp(tail_scale * depth)
    slope_window: float = 4.0
    slope_points: int = 5
    profile_points: int = 12
    vanish_ratio: float = 0.05
    vanish_slope: float = 0.5
    check_regularity: bool = True

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "DensitySettings":
        defaults = cls()
        raw = data.get("thresholds", defaults.thresholds)
        if not isinstance(raw, list | tuple) or not raw:
            raise ConfigError("`density.thresholds` must be a nonempty list.")
        thresholds = tuple(_positive_float({"t": t}, "t", 1.0, "density.thresholds") for t in raw)
        if any(b <= a for a, b in zip(thresholds, thresholds[1:], strict=False)):
            raise ConfigError("`density.thresholds` must be strictly increasing.")
        slope_window = _positive_float(data, "slope_window", defaults.slope_window, "density")
        if slope_window <= 1:
            raise ConfigError("`density.slope_window` must exceed 1.")
        slope_points = _positive_int(data, "slope_points", defaults.slope_points, "density")
        if slope_points < 2:
            raise ConfigError("`density.slope_points` must be at least 2.")
        return cls(
            thresholds=thresholds,
            resolve_depth=_positive_float(data, "resolve_depth", defaults.resolve_depth, "density"),
            tail_scale=_positive_float(data, "tail_scale", defaults.tail_scale, "density"),
            slope_window=slope_window,
            slope_points=slope_points,
            profile_points=_positive_int(data, "profile_points", defaults.profile_points, "density"),
            vanish_ratio=_positive_float(data, "vanish_ratio", defaults.vanish_ratio, "density"),
            vanish_slope=_positive_float(data, "vanish_slope", defaults.vanish_slope, "density"),
            check_regularity=bool(data.get("check_regularity", True)),
        )


@dataclass(slots=True)
class VerifySettings:
    seed: int = 42
    instances: int = 1000

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "VerifySettings":
        seed = data.get("seed", 42)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("`verify.seed` must be an unsigned integer.")
        return cls(seed=seed, instances=_positive_int(data, "instances", 1000, "verify"))


@dataclass(slots=True)
class LoggingSettings:
    level: str = "WARNING"
    numpy_errors: str = "ignore"  # np.seterr mode for divide, overflow, underflow and invalid

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "LoggingSettings":
        level = data.get("level", "WARNING")
        if not isinstance(level, str) or level.upper() not in LOG_LEVELS:
            raise ConfigError(f"`logging.level` must be one of {', '.join(LOG_LEVELS)}.")
        numpy_errors = data.get("numpy_errors", "ignore")
        if numpy_errors not in NUMPY_ERROR_MODES:
            raise ConfigError(f"`logging.numpy_errors` must be one of {', '.join(NUMPY_ERROR_MODES)}.")
        return cls(level=level.upper(), numpy_errors=numpy_errors)


@dataclass(slots=True)
class LimitSettings:
    threads: int | None = None

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], environ: Mapping[str, str] | None = None) -> "LimitSettings":
        environ = os.environ if environ is None else environ
        threads = _positive_int(data, "threads", None, "limits")
        override = environ.get(THREADS_ENV)
        if override:
            if not override.isdigit() or int(override) <= 0:
                raise ConfigError(f"`{THREADS_ENV}` must be a positive integer, got {override!r}.")
            threads = int(override)
        return cls(threads=threads)


@dataclass(slots=True)
class GrandnormConfig:
    tolerances: ToleranceSettings = field(default_factory=ToleranceSettings)
    grid: GridSettings = field(default_factory=GridSettings)
    density: DensitySettings = field(default_factory=DensitySettings)
    verify: VerifySettings = field(default_factory=VerifySettings)
    logging: LoggingSettings = field(default_factory=LoggingSettings)
    limits: LimitSettings = field(default_factory=LimitSettings)

    @classmethod
    def default(cls) -> "GrandnormConfig":
        return cls.from_mapping({})

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any]) -> "GrandnormConfig":
        for section in ("tolerances", "grid", "density", "verify", "logging", "limits"):
            if not isinstance(payload.get(section, {}), Mapping):
                raise ConfigError(f"`{section}` must be a mapping.")
        return cls(
            tolerances=ToleranceSettings.from_mapping(payload.get("tolerances", {})),
            grid=GridSettings.from_mapping(payload.get("grid", {})),
            density=DensitySettings.from_mapping(payload.get("density", {})),
            verify=VerifySettings.from_mapping(payload.get("verify", {})),
            logging=LoggingSettings.from_mapping(payload.get("logging", {})),
            limits=LimitSettings.from_mapping(payload.get("limits", {})),
        )

    @classmethod
    def from_file(cls, yaml_path: str | Path) -> "GrandnormConfig":
        path = Path(yaml_path).expanduser()
        if not path.exists():
            raise ConfigError(f"Configuration file not found: {path}")

        raw_data = path.read_text(encoding="utf-8")
        payload = yaml.safe_load(raw_data) or {}
        if not isinstance(payload, MutableMapping):
            raise ConfigError("Configuration file must contain a mapping at the top level.")
        return cls.from_mapping(payload)
