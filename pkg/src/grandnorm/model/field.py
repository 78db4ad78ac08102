"""
Function samples f(x_i) on the points of a space.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from grandnorm.model.errors import InvalidFieldError


@dataclass(frozen=True, eq=False)
class Field:
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InvalidFieldError("field values must be a nonempty one-dimensional array")
        if not np.all(np.isfinite(values)):
            raise InvalidFieldError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, n: int) -> "Field":
        return cls(np.zeros(n))

    @classmethod
    def of(cls, values: ArrayLike) -> "Field":
        return cls(np.asarray(values, dtype=np.float64))

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def scaled(self, factor: float) -> "Field":
        return Field(self.values * factor)

    def __add__(self, other: "Field") -> "Field":
        return Field(self.values + other.values)
