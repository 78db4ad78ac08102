"""
Blocks and block decompositions of the predual space.
"""

from dataclasses import dataclass, field

import numpy as np

from grandnorm.model.field import Field


@dataclass(frozen=True, eq=False)
class Block:
    values: Field
    kappa: float


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    terms: tuple[tuple[float, Block], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple((float(lam), block) for lam, block in self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def cost(self) -> float:
        return float(sum(abs(lam) for lam, _ in self.terms))

    @property
    def kappas(self) -> tuple[float, ...]:
        return tuple(block.kappa for _, block in self.terms)

    def reconstruct(self, n: int) -> Field:
        """Sum of lambda_j * b_j accumulated in term order."""
        total = np.zeros(n)
        for lam, block in self.terms:
            total = total + lam * block.values.values
        return Field(total)
