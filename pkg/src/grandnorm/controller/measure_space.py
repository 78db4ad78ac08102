"""
Balls, measures and structural constants of a finite quasi-metric measure space.

Every sup over radii in this package runs over critical_radii: one radius per distinct
ball around a center, so the ball family is enumerated exactly once.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from grandnorm.model.errors import ParameterRangeError
from grandnorm.model.reports import SpaceReport
from grandnorm.model.space import QuasiMetricSpace, restrict

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BallFamily:
    """All distinct balls around one center, in increasing order."""

    center: int
    order: NDArray[np.intp]  # point indices sorted by distance from center
    distances: NDArray[np.float64]  # distances in that order
    radii: NDArray[np.float64]
    sizes: NDArray[np.intp]  # ball k is order[:sizes[k]]
    measures: NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class BallTable:
    """Every ball of the space flattened into parallel arrays, centers ascending."""

    orders: NDArray[np.intp]  # (n, n): row x is the distance order around x
    centers: NDArray[np.intp]
    sizes: NDArray[np.intp]
    measures: NDArray[np.float64]


def _check_center(space: QuasiMetricSpace, center: int) -> None:
    if not 0 <= center < space.n:
        raise ParameterRangeError(f"center index {center} outside [0, {space.n})")


def ball(space: QuasiMetricSpace, center: int, r: float) -> NDArray[np.intp]:
    """Indices j with d(center, j) < r, ascending."""
    _check_center(space, center)
    if not r > 0:
        raise ParameterRangeError(f"ball radius must be positive, got {r}")
    return np.flatnonzero(space.distances_from(center) < r)


def ball_measure(space: QuasiMetricSpace, center: int, r: float) -> float:
    return float(np.sum(space.weight[ball(space, center, r)]))


def critical_radii(space: QuasiMetricSpace, center: int) -> NDArray[np.float64]:
    _check_center(space, center)
    row = space.distances_from(center)
    positive = np.unique(row[row > 0])
    if positive.size == 0:
        return np.array([1.0])
    bump = 1.0 + space.radius_bump
    # the smallest positive distance itself realizes the singleton {center}
    radii = np.concatenate(([positive[0]], positive * bump))
    sizes = np.searchsorted(np.sort(row), radii, side="left")
    radii = radii[np.concatenate(([True], np.diff(sizes) > 0))]
    radii[-1] = max(radii[-1], space.diameter * bump)
    return radii


def ball_family(space: QuasiMetricSpace, center: int) -> BallFamily:
    radii = critical_radii(space, center)
    row = space.distances_from(center)
    order = np.argsort(row, kind="stable")
    distances = row[order]
    sizes = np.searchsorted(distances, radii, side="left")
    measures = np.cumsum(space.weight[order])[sizes - 1]
    return BallFamily(center, order, distances, radii, sizes, measures)


def iter_ball_families(space: QuasiMetricSpace):
    for center in range(space.n):
        yield ball_family(space, center)


@lru_cache(maxsize=4)
def ball_table(space: QuasiMetricSpace) -> BallTable:
    families = list(iter_ball_families(space))
    table = BallTable(
        orders=np.vstack([family.order for family in families]),
        centers=np.concatenate([np.full(family.sizes.size, family.center) for family in families]),
        sizes=np.concatenate([family.sizes for family in families]),
        measures=np.concatenate([family.measures for family in families]),
    )
    logger.debug(f"ball table for {space.label or 'space'}: n={space.n} balls={table.sizes.size}")
    return table


def quasi_triangle_constant(space: QuasiMetricSpace) -> float:
    """Smallest K >= 1 with d(i,j) <= K (d(i,k) + d(k,j)) over all triples."""
    n = space.n
    if n < 3:
        return 1.0
    dist = space.dist
    best = 1.0
    for k in range(n):
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = dist / (dist[:, k][:, None] + dist[k, :][None, :])
        # triples with k in {i, j}
        ratio[k, :] = 0.0
        ratio[:, k] = 0.0
        best = max(best, float(np.max(ratio)))
    return best


def doubling_constant(space: QuasiMetricSpace) -> float:
    best = 1.0
    for family in iter_ball_families(space):
        cumulative = np.cumsum(space.weight[family.order])
        doubled = np.searchsorted(family.distances, 2.0 * family.radii, side="left")
        best = max(best, float(np.max(cumulative[doubled - 1] / family.measures)))
    return best


def exhaustion_indices(space: QuasiMetricSpace, levels: int, anchor: int = 0) -> list[NDArray[np.intp]]:
    """Sorted point sets of nested subspaces grown by distance from an anchor point."""
    _check_center(space, anchor)
    if levels < 1:
        raise ParameterRangeError(f"exhaustion needs at least one level, got {levels}")
    order = np.argsort(space.distances_from(anchor), kind="stable")
    counts = sorted({max(1, math.ceil(space.n * j / levels)) for j in range(1, levels + 1)})
    return [np.sort(order[:count]) for count in counts]


def exhaustion(space: QuasiMetricSpace, levels: int, anchor: int = 0) -> list[QuasiMetricSpace]:
    """Nested subspaces X_1 c ... c X_levels = X."""
    return [space if idx.size == space.n else restrict(space, idx) for idx in exhaustion_indices(space, levels, anchor)]


def space_report(space: QuasiMetricSpace, with_triangle: bool = True) -> SpaceReport:
    return SpaceReport(
        label=space.label,
        n=space.n,
        total_measure=space.total_measure,
        diameter=space.diameter,
        depth=space.depth,
        quasi_triangle=quasi_triangle_constant(space) if with_triangle else None,
        doubling=doubling_constant(space),
    )
