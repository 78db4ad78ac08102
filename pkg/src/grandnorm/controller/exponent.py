"""
Operations on variable exponents: bounds, conjugates, shifts and regularity diagnostics.

The log-Hoelder constant is written a_LH here to keep it apart from the predual cap a.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from grandnorm.controller.measure_space import iter_ball_families
from grandnorm.model.errors import ParameterRangeError
from grandnorm.model.exponent import Exponent, MorreyExponent
from grandnorm.model.params import GrandParams
from grandnorm.model.reports import RegularityReport
from grandnorm.model.space import QuasiMetricSpace

logger = logging.getLogger(__name__)

ExponentLike = Exponent | MorreyExponent | NDArray[np.float64]


def _values(p: ExponentLike) -> NDArray[np.float64]:
    return p.values if isinstance(p, Exponent | MorreyExponent) else np.asarray(p, dtype=np.float64)


def bounds(p: ExponentLike, points: ArrayLike) -> tuple[float, float]:
    subset = np.asarray(points, dtype=np.intp)
    if subset.size == 0:
        raise ParameterRangeError("bounds need a nonempty point set")
    restricted = _values(p)[subset]
    return float(np.min(restricted)), float(np.max(restricted))


def conjugate(p: Exponent) -> Exponent:
    return Exponent(p.values / (p.values - 1.0))


def shift(p: Exponent, c: float) -> Exponent:
    if not 0 < c < p.minus - 1.0:
        raise ParameterRangeError(f"shift c = {c} outside (0, {p.minus - 1.0})")
    return Exponent(p.values - c)


def log_holder_constant(space: QuasiMetricSpace, p: ExponentLike) -> float:
    """
    max |p(x) - p(y)| * (-ln mu(B(x, d(x,y)))) over pairs x != y whose ball has measure <= 1/2.
    """
    values = _values(p)
    best = 0.0
    for center in range(space.n):
        row = space.distances_from(center)
        order = np.argsort(row, kind="stable")
        sorted_row = row[order]
        before = np.concatenate(([0.0], np.cumsum(space.weight[order])))
        # mu(B(x, d(x,y))) counts points strictly closer than y
        measure = before[np.searchsorted(sorted_row, row, side="left")]
        qualifying = (row > 0) & (measure <= 0.5)
        if np.any(qualifying):
            gaps = np.abs(values[qualifying] - values[center]) * -np.log(measure[qualifying])
            best = max(best, float(np.max(gaps)))
    return best


def diening_sup(space: QuasiMetricSpace, p: ExponentLike) -> tuple[float, float]:
    """
    (max over balls of mu(B)^(p-(B) - p+(B)), max over balls and x, y in B of mu(B)^|p(x) - p(y)|).
    """
    values = _values(p)
    ball_sup, pair_sup = 1.0, 1.0
    for family in iter_ball_families(space):
        ordered = values[family.order]
        low = np.minimum.accumulate(ordered)[family.sizes - 1]
        high = np.maximum.accumulate(ordered)[family.sizes - 1]
        oscillation = high - low
        ball_sup = max(ball_sup, float(np.max(family.measures ** (-oscillation))))
        # |p(x) - p(y)| ranges over [0, oscillation]; mu^t peaks at an endpoint
        pair_sup = max(pair_sup, float(np.max(family.measures**oscillation)))
    return ball_sup, pair_sup


def shift_log_holder(space: QuasiMetricSpace, p: Exponent, params: GrandParams) -> float:
    """Uniform-in-c log-Hoelder constant of 1/(p - c) over the grid."""
    params.check_against(p.minus)
    return max(log_holder_constant(space, 1.0 / shift(p, c).values) for c in params.shifts)


def regularity_report(
    space: QuasiMetricSpace, p: Exponent, params: GrandParams | None = None
) -> RegularityReport:
    ball_sup, pair_sup = diening_sup(space, p)
    report = RegularityReport(
        p_minus=p.minus,
        p_plus=p.plus,
        log_holder=log_holder_constant(space, p),
        diening_ball=ball_sup,
        diening_pair=pair_sup,
        shift_log_holder=shift_log_holder(space, p, params) if params is not None else None,
    )
    logger.debug(f"regularity of {space.label or 'space'}: {report}")
    return report
