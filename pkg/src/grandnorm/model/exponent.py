"""
Variable exponents: p(.) of class P(X) and Morrey exponents lambda(.) with values in [0,1].
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray

from grandnorm.model.errors import InvalidExponentError


def _as_frozen_vector(values: ArrayLike, what: str) -> NDArray[np.float64]:
    vector = np.array(values, dtype=np.float64)
    if vector.ndim != 1 or vector.size == 0:
        raise InvalidExponentError(f"{what} values must be a nonempty one-dimensional array")
    if not np.all(np.isfinite(vector)):
        raise InvalidExponentError(f"{what} values must be finite")
    vector.setflags(write=False)
    return vector


@dataclass(frozen=True, eq=False)
class Exponent:
    """Pointwise exponent with 1 < p- <= p+ < infinity."""

    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        values = _as_frozen_vector(self.values, "exponent")
        if np.min(values) <= 1.0:
            raise InvalidExponentError(f"exponent must exceed 1 everywhere, minimum is {np.min(values)!r}")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, n: int, value: float) -> "Exponent":
        return cls(np.full(n, float(value)))

    @property
    def n(self) -> int:
        return int(self.values.size)

    @cached_property
    def minus(self) -> float:
        return float(np.min(self.values))

    @cached_property
    def plus(self) -> float:
        return float(np.max(self.values))

    @property
    def is_constant(self) -> bool:
        return self.minus == self.plus


@dataclass(frozen=True, eq=False)
class MorreyExponent:
    """Pointwise Morrey exponent with values in [0,1]."""

    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        values = _as_frozen_vector(self.values, "Morrey exponent")
        if np.min(values) < 0.0 or np.max(values) > 1.0:
            raise InvalidExponentError("Morrey exponent values must lie in [0, 1]")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, n: int, value: float = 0.0) -> "MorreyExponent":
        return cls(np.full(n, float(value)))

    @property
    def n(self) -> int:
        return int(self.values.size)

    @cached_property
    def is_zero(self) -> bool:
        return not np.any(self.values)
