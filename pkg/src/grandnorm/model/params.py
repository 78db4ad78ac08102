"""
Shift grids for grand norms (c-grid) and for the predual scale (kappa-grid).
"""

import math
from dataclasses import dataclass

import numpy as np

from grandnorm.model.errors import ParameterRangeError

DYADIC_MATCH_RTOL = 1e-12


def _as_increasing_tuple(values, what: str) -> tuple[float, ...]:
    grid = tuple(float(v) for v in values)
    if not grid:
        raise ParameterRangeError(f"{what} must be nonempty")
    if not all(math.isfinite(v) and v > 0 for v in grid):
        raise ParameterRangeError(f"{what} values must be positive and finite")
    if any(b <= a for a, b in zip(grid, grid[1:], strict=False)):
        raise ParameterRangeError(f"{what} must be strictly increasing")
    return grid


@dataclass(frozen=True)
class GrandParams:
    theta: float
    shifts: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise ParameterRangeError(f"theta must be positive, got {self.theta}")
        object.__setattr__(self, "shifts", _as_increasing_tuple(self.shifts, "shift grid"))

    @classmethod
    def geometric(cls, theta: float, p_minus: float, count: int = 64, offset: float = 1e-3) -> "GrandParams":
        """
        Grid on (0, p- - 1) accumulating geometrically at both ends.

        Half of the points run from (p- - 1)*offset up to the midpoint, the other half
        from the midpoint up to (p- - 1)*(1 - offset).
        """
        if count < 2:
            raise ParameterRangeError(f"grid count must be at least 2, got {count}")
        if not 0 < offset < 0.5:
            raise ParameterRangeError(f"grid offset must lie in (0, 0.5), got {offset}")
        upper = p_minus - 1.0
        if upper <= 0:
            raise ParameterRangeError(f"p- must exceed 1, got {p_minus}")
        half = count // 2
        lower_part = upper * np.geomspace(offset, 0.5, half, endpoint=False)
        upper_part = upper * (1.0 - np.geomspace(0.5, offset, count - half))
        return cls(theta=theta, shifts=tuple(np.concatenate((lower_part, upper_part))))

    @property
    def c_min(self) -> float:
        return self.shifts[0]

    @property
    def c_max(self) -> float:
        return self.shifts[-1]

    def refined(self) -> "GrandParams":
        """Superset grid with the geometric mean of every adjacent pair inserted."""
        grid = np.asarray(self.shifts)
        means = np.sqrt(grid[:-1] * grid[1:])
        merged = np.empty(grid.size + means.size)
        merged[0::2] = grid
        merged[1::2] = means
        return GrandParams(theta=self.theta, shifts=tuple(merged))

    def check_against(self, p_minus: float) -> None:
        if self.c_max >= p_minus - 1.0:
            raise ParameterRangeError(f"shift {self.c_max} is not below p- - 1 = {p_minus - 1.0}")


@dataclass(frozen=True)
class ScriptLParams:
    theta: float
    a: float
    kappa_grid: tuple[float, ...]

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta):
            raise ParameterRangeError(f"theta must be finite, got {self.theta}")
        if not (math.isfinite(self.a) and self.a > 0):
            raise ParameterRangeError(f"a must be positive, got {self.a}")
        grid = _as_increasing_tuple(self.kappa_grid, "kappa grid")
        if grid[-1] != self.a:
            raise ParameterRangeError("kappa grid must end at the closed endpoint a")
        object.__setattr__(self, "kappa_grid", grid)

    @classmethod
    def dyadic(cls, theta: float, a: float, levels: int = 20) -> "ScriptLParams":
        if levels < 0:
            raise ParameterRangeError(f"dyadic levels must be nonnegative, got {levels}")
        grid = tuple(math.ldexp(a, -level) for level in range(levels, -1, -1))
        return cls(theta=theta, a=a, kappa_grid=grid)

    def check_against(self, p_minus: float) -> None:
        if self.a >= p_minus - 1.0:
            raise ParameterRangeError(f"a = {self.a} is not below p- - 1 = {p_minus - 1.0}")

    def check_kappa(self, kappa: float) -> None:
        if not (0 < kappa <= self.a):
            raise ParameterRangeError(f"kappa must lie in (0, {self.a}], got {kappa}")

    def dyadic_level(self, kappa: float) -> int | None:
        """The l with kappa = 2^-l a, or None when kappa is not dyadic."""
        self.check_kappa(kappa)
        level = round(math.log2(self.a / kappa))
        if abs(math.ldexp(self.a, -level) - kappa) <= DYADIC_MATCH_RTOL * kappa:
            return level
        return None

    def bracket_level(self, kappa: float) -> int:
        """The l >= 1 with 2^-l a <= kappa <= 2^-l+1 a."""
        self.check_kappa(kappa)
        ratio = math.log2(self.a / kappa)
        level = max(1, math.ceil(ratio - DYADIC_MATCH_RTOL))
        low = math.ldexp(self.a, -level) * (1 - DYADIC_MATCH_RTOL)
        high = math.ldexp(self.a, 1 - level) * (1 + DYADIC_MATCH_RTOL)
        if not low <= kappa <= high:
            raise ParameterRangeError(f"cannot place kappa = {kappa} between dyadic levels of a = {self.a}")
        return level
