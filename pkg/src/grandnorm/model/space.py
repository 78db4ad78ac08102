"""
Finite quasi-metric measure spaces.

A QuasiMetricSpace is a cell quadrature of an atomless space: each point is a cell
representative and its weight is the cell measure. Distances are given either as an
explicit matrix or derived on demand from coordinates, d(x, y) = |x - y|^alpha.

Generators:
- dyadic_interval(level, alpha): 2^level equal cells on [0,1].
- uniform_interval(n, length, alpha): n equal cells on [0,length].
- graded_interval(depth, cells_per_shell, alpha): dyadic shells accumulating at 0.
- restrict(space, indices): the subspace on a subset of points.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray

from grandnorm.model.errors import InvalidSpaceError

DEFAULT_RADIUS_BUMP = 1e-9


def _frozen(values: NDArray) -> NDArray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class QuasiMetricSpace:
    weight: NDArray[np.float64]
    dist_matrix: NDArray[np.float64] | None = None
    coords: NDArray[np.float64] | None = None
    alpha: float = 1.0  # snowflake exponent applied to coordinate distances
    label: str = ""
    radius_bump: float = DEFAULT_RADIUS_BUMP  # relative offset realizing closed-ball coverage

    def __post_init__(self) -> None:
        weight = np.array(self.weight, dtype=np.float64)
        if weight.ndim != 1 or weight.size == 0:
            raise InvalidSpaceError("weights must be a nonempty one-dimensional array")
        if not np.all(np.isfinite(weight)) or np.any(weight <= 0):
            raise InvalidSpaceError("weights must be positive and finite")
        object.__setattr__(self, "weight", _frozen(weight))

        if (self.dist_matrix is None) == (self.coords is None):
            raise InvalidSpaceError("exactly one of a distance matrix or coordinates is required")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InvalidSpaceError(f"snowflake exponent must be positive, got {self.alpha}")
        if not (0 < self.radius_bump < 1e-3):
            raise InvalidSpaceError(f"radius bump must lie in (0, 1e-3), got {self.radius_bump}")

        n = weight.size
        if self.dist_matrix is not None:
            dist = np.array(self.dist_matrix, dtype=np.float64)
            if dist.shape != (n, n):
                raise InvalidSpaceError(f"distance matrix must be {n}x{n}, got {dist.shape}")
            if not np.all(np.isfinite(dist)):
                raise InvalidSpaceError("distances must be finite")
            if not np.array_equal(dist, dist.T):
                raise InvalidSpaceError("distance matrix must be symmetric")
            if np.any(np.diag(dist) != 0):
                raise InvalidSpaceError("distance matrix must have a zero diagonal")
            off_diagonal = dist[~np.eye(n, dtype=bool)]
            if np.any(off_diagonal <= 0):
                raise InvalidSpaceError("distinct points must be at positive distance")
            object.__setattr__(self, "dist_matrix", _frozen(dist))
        else:
            coords = np.array(self.coords, dtype=np.float64)
            if coords.ndim not in (1, 2) or coords.shape[0] != n:
                raise InvalidSpaceError(f"coordinates must have {n} rows, got shape {coords.shape}")
            if not np.all(np.isfinite(coords)):
                raise InvalidSpaceError("coordinates must be finite")
            distinct = np.unique(coords, axis=0).shape[0]
            if distinct != n:
                raise InvalidSpaceError(f"coordinates must be distinct ({n - distinct} duplicates)")
            object.__setattr__(self, "coords", _frozen(coords))

    @property
    def n(self) -> int:
        return int(self.weight.size)

    @cached_property
    def total_measure(self) -> float:
        return float(np.sum(self.weight))

    @cached_property
    def depth(self) -> float:
        """Logarithmic resolution ln(mu(X) / smallest cell measure)."""
        return math.log(self.total_measure / float(np.min(self.weight)))

    @property
    def positions(self) -> NDArray[np.float64] | None:
        """First coordinate of every point, used by symbolic generators."""
        if self.coords is None:
            return None
        return self.coords if self.coords.ndim == 1 else self.coords[:, 0]

    def distances_from(self, center: int) -> NDArray[np.float64]:
        if self.dist_matrix is not None:
            return self.dist_matrix[center]
        if self.coords.ndim == 1:
            gap = np.abs(self.coords - self.coords[center])
        else:
            gap = np.linalg.norm(self.coords - self.coords[center], axis=1)
        return gap if self.alpha == 1.0 else gap**self.alpha

    @cached_property
    def dist(self) -> NDArray[np.float64]:
        """Full distance matrix; materialized on first use for coordinate spaces."""
        if self.dist_matrix is not None:
            return self.dist_matrix
        return _frozen(np.vstack([self.distances_from(i) for i in range(self.n)]))

    @cached_property
    def diameter(self) -> float:
        if self.dist_matrix is not None:
            return float(np.max(self.dist_matrix))
        if self.coords.ndim == 1:
            return float((np.max(self.coords) - np.min(self.coords)) ** self.alpha)
        return float(max(np.max(self.distances_from(i)) for i in range(self.n)))


def _midpoint_space(edges: NDArray, alpha: float, label: str, radius_bump: float) -> QuasiMetricSpace:
    return QuasiMetricSpace(
        weight=np.diff(edges),
        coords=0.5 * (edges[:-1] + edges[1:]),
        alpha=alpha,
        label=label,
        radius_bump=radius_bump,
    )


def uniform_interval(
    n: int, length: float = 1.0, alpha: float = 1.0, radius_bump: float = DEFAULT_RADIUS_BUMP
) -> QuasiMetricSpace:
    if n < 1:
        raise InvalidSpaceError(f"cell count must be positive, got {n}")
    if not length > 0:
        raise InvalidSpaceError(f"interval length must be positive, got {length}")
    edges = np.linspace(0.0, length, n + 1)
    return _midpoint_space(edges, alpha, f"uniform:{n},{length:g}", radius_bump)


def dyadic_interval(level: int, alpha: float = 1.0, radius_bump: float = DEFAULT_RADIUS_BUMP) -> QuasiMetricSpace:
    if level < 0:
        raise InvalidSpaceError(f"dyadic level must be nonnegative, got {level}")
    edges = np.linspace(0.0, 1.0, 2**level + 1)
    label = f"dyadic:{level}" if alpha == 1.0 else f"snowflake:{level},{alpha:g}"
    return _midpoint_space(edges, alpha, label, radius_bump)


def graded_interval(
    depth: int, cells_per_shell: int = 4, alpha: float = 1.0, radius_bump: float = DEFAULT_RADIUS_BUMP
) -> QuasiMetricSpace:
    """
    Cells accumulating at 0: the inner cell [0, 2^-depth] and every dyadic shell
    [2^-(k+1), 2^-k], k < depth, split into cells_per_shell equal cells.
    """
    if not 1 <= depth <= 1000:
        raise InvalidSpaceError(f"graded depth must lie in [1, 1000], got {depth}")
    if cells_per_shell < 1:
        raise InvalidSpaceError(f"cells per shell must be positive, got {cells_per_shell}")
    edges = [0.0]
    for k in range(depth - 1, -1, -1):
        low, high = math.ldexp(1.0, -k - 1), math.ldexp(1.0, -k)
        edges.extend(low + (high - low) * np.arange(cells_per_shell) / cells_per_shell)
    edges.append(1.0)
    return _midpoint_space(np.asarray(edges), alpha, f"graded:{depth},{cells_per_shell}", radius_bump)


def restrict(space: QuasiMetricSpace, indices: ArrayLike) -> QuasiMetricSpace:
    idx = np.unique(np.asarray(indices, dtype=np.intp))
    if idx.size == 0:
        raise InvalidSpaceError("cannot restrict to an empty point set")
    if idx[0] < 0 or idx[-1] >= space.n:
        raise InvalidSpaceError("restriction indices out of range")
    if space.dist_matrix is not None:
        return QuasiMetricSpace(
            weight=space.weight[idx],
            dist_matrix=space.dist_matrix[np.ix_(idx, idx)],
            label=f"{space.label}[{idx.size}]",
            radius_bump=space.radius_bump,
        )
    return QuasiMetricSpace(
        weight=space.weight[idx],
        coords=space.coords[idx],
        alpha=space.alpha,
        label=f"{space.label}[{idx.size}]",
        radius_bump=space.radius_bump,
    )
