"""
Approximation by bounded functions and closure-membership diagnostics.

Two diagnostics decide whether f lies in the closure of bounded functions inside the
grand space, both only meaningful on a refinement family:

- tail: the grand norm of f * [|f| > N] as N grows (truncation characterization);
- small-c: the behaviour of c^(theta/(p- - c)) ||f||_{p-c,lam} as c -> 0.

A level of depth D = ln(mu(X)/smallest cell) resolves shifts down to order 1/D and
thresholds up to order exp(D). Each level is therefore read at c = scale / D and at a
threshold growing like exp(tail_scale * D). Against ln D, bounded behaviour then decays
with slope about -theta/p-, while a persistent limit stays flat or grows.
"""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from grandnorm.config import DensitySettings, GridSettings, ToleranceSettings
from grandnorm.controller.exponent import log_holder_constant, shift
from grandnorm.controller.measure_space import doubling_constant
from grandnorm.controller.morrey_grand import MORREY_TOL, grand_morrey_norm, morrey_norm
from grandnorm.model.errors import ParameterRangeError
from grandnorm.model.exponent import Exponent, MorreyExponent
from grandnorm.model.field import Field
from grandnorm.model.params import GrandParams
from grandnorm.model.reports import ClosureReport, LevelDiagnostic, Verdict
from grandnorm.model.space import QuasiMetricSpace

logger = logging.getLogger(__name__)

ExponentOf = Callable[[QuasiMetricSpace], Exponent]
MorreyOf = Callable[[QuasiMetricSpace], MorreyExponent]
FieldOf = Callable[[QuasiMetricSpace], Field]


def _check_threshold(threshold: float) -> None:
    if not threshold > 0:
        raise ParameterRangeError(f"truncation threshold must be positive, got {threshold}")


def truncate(f: Field, threshold: float) -> Field:
    _check_threshold(threshold)
    return Field(np.where(np.abs(f.values) <= threshold, f.values, 0.0))


def tail(f: Field, threshold: float) -> Field:
    _check_threshold(threshold)
    return Field(np.where(np.abs(f.values) > threshold, f.values, 0.0))


def tail_profile(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    params: GrandParams,
    f: Field,
    thresholds: Sequence[float],
    tol: float = MORREY_TOL,
) -> list[float]:
    levels = [float(t) for t in thresholds]
    if not levels:
        raise ParameterRangeError("threshold list must be nonempty")
    if any(b <= a for a, b in zip(levels, levels[1:], strict=False)):
        raise ParameterRangeError("thresholds must be strictly increasing")
    return [grand_morrey_norm(space, p, lam, params, tail(f, t), tol) for t in levels]


def small_c_profile(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    theta: float,
    f: Field,
    shifts: Sequence[float],
    tol: float = MORREY_TOL,
) -> list[float]:
    values = [float(c) for c in shifts]
    if not values:
        raise ParameterRangeError("shift list must be nonempty")
    if any(b >= a for a, b in zip(values, values[1:], strict=False)):
        raise ParameterRangeError("small-c shifts must be strictly decreasing")
    return [c ** (theta / (p.minus - c)) * morrey_norm(space, shift(p, c), lam, f, tol) for c in values]


def _slope(shifts: np.ndarray, profile: np.ndarray, upper: float) -> float | None:
    window = (shifts <= upper * (1 + 1e-12)) & (profile > 0)
    if np.count_nonzero(window) < 2:
        return None
    return float(np.polyfit(np.log(shifts[window]), np.log(profile[window]), 1)[0])


def _relative_change(coarse: float, fine: float) -> float:
    scale = max(abs(coarse), abs(fine))
    return 0.0 if scale == 0 else abs(fine - coarse) / scale


def _depth_trend(coarse: float, fine: float, coarse_depth: float, fine_depth: float) -> float | None:
    """d ln(estimate) / d ln(depth) between two levels."""
    if coarse <= 0 or fine <= 0 or fine_depth <= coarse_depth:
        return None
    return float(np.log(fine / coarse) / np.log(fine_depth / coarse_depth))


def _shift_list(c_hi: float, c_level: float, settings: DensitySettings) -> np.ndarray:
    """Decreasing shifts from c_hi down to c_level, denser inside the slope window."""
    coarse = np.geomspace(c_hi, c_level, settings.profile_points)
    fine = np.geomspace(min(settings.slope_window * c_level, c_hi), c_level, settings.slope_points)
    return np.unique(np.concatenate((coarse, fine)))[::-1]


def _level_thresholds(depth: float, settings: DensitySettings) -> list[float]:
    """Configured thresholds capped at exp(tail_scale * depth), the largest one the level resolves."""
    cap = min(settings.thresholds[-1], float(np.exp(settings.tail_scale * depth)))
    return [float(t) for t in settings.thresholds if t < cap] + [cap]


def _evaluate_level(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    theta: float,
    f: Field,
    shifts: np.ndarray,
    settings: DensitySettings,
    tolerances: ToleranceSettings,
    grid: GridSettings,
) -> LevelDiagnostic:
    params = GrandParams.geometric(theta, p.minus, grid.count, grid.offset)
    grand = grand_morrey_norm(space, p, lam, params, f, tolerances.morrey)
    thresholds = _level_thresholds(space.depth, settings)
    tails = tail_profile(space, p, lam, params, f, thresholds, tolerances.morrey)
    profile = np.array(small_c_profile(space, p, lam, theta, f, shifts, tolerances.morrey))
    diagnostic = LevelDiagnostic(
        label=space.label,
        n=space.n,
        depth=space.depth,
        grand_norm=grand,
        thresholds=thresholds,
        tail_profile=tails,
        tail_estimate=tails[-1],
        shifts=shifts.tolist(),
        small_c_profile=profile.tolist(),
        small_c_slope=_slope(shifts, profile, settings.slope_window * shifts[-1]),
        small_c_estimate=float(profile[-1]),
    )
    if settings.check_regularity:
        diagnostic.log_holder = log_holder_constant(space, p)
        diagnostic.doubling = doubling_constant(space)
    logger.debug(f"level {space.label} n={space.n}: grand={grand:.6g} tail={tails[-1]:.6g}")
    return diagnostic


def _verdict(coarse: float, fine: float, trend: float | None, floor: float, gate: float, tolerance: float) -> Verdict:
    """
    Vanishing when both estimates sit under the floor or decay at least like depth^-gate;
    persisting when they grow at that rate or agree within the trend tolerance.
    """
    if max(coarse, fine) <= floor:
        return Verdict.VANISHES
    if trend is not None and trend <= -gate:
        return Verdict.VANISHES
    if trend is not None and trend >= gate:
        return Verdict.PERSISTS
    if _relative_change(coarse, fine) <= tolerance:
        return Verdict.PERSISTS
    return Verdict.INCONCLUSIVE


def closure_diagnostic(
    spaces: Sequence[QuasiMetricSpace],
    p_of: ExponentOf,
    lam_of: MorreyOf,
    theta: float,
    f_of: FieldOf,
    settings: DensitySettings | None = None,
    tolerances: ToleranceSettings | None = None,
    grid: GridSettings | None = None,
    threads: int | None = None,
) -> ClosureReport:
    """
    Tail and small-c verdicts for f on a refinement family, read off the two finest levels.

    Level k evaluates the small-c product at c_k = scale / depth_k and the tail at
    N_k = min(largest threshold, exp(tail_scale * depth_k)); both estimates then compare
    like for like across levels, and their log-log trend against depth decides.
    """
    settings = settings or DensitySettings()
    tolerances = tolerances or ToleranceSettings()
    grid = grid or GridSettings()
    if len(spaces) < 2:
        raise ParameterRangeError("a refinement family needs at least two levels")
    family = sorted(spaces, key=lambda s: (s.depth, s.n))
    exponents = [p_of(space) for space in family]
    p_minus = min(p.minus for p in exponents)

    c_hi = 0.5 * (p_minus - 1.0)
    scale = min(settings.resolve_depth, c_hi * family[0].depth)
    resolved = scale >= settings.resolve_depth
    if not resolved:
        logger.warning(
            f"refinement family too shallow (depth {family[0].depth:.3g}); small-c levels are lower estimates"
        )

    def evaluate(index: int) -> LevelDiagnostic:
        space = family[index]
        shifts = _shift_list(c_hi, scale / space.depth, settings)
        return _evaluate_level(
            space, exponents[index], lam_of(space), theta, f_of(space), shifts, settings, tolerances, grid
        )

    with ThreadPoolExecutor(max_workers=threads) as executor:
        levels = list(executor.map(evaluate, range(len(family))))

    coarse, fine = levels[-2], levels[-1]
    expected = theta / p_minus
    gate = settings.vanish_slope * expected
    tail_trend = _depth_trend(coarse.tail_estimate, fine.tail_estimate, coarse.depth, fine.depth)
    small_c_trend = _depth_trend(coarse.small_c_estimate, fine.small_c_estimate, coarse.depth, fine.depth)
    tail_verdict = _verdict(
        coarse.tail_estimate,
        fine.tail_estimate,
        tail_trend,
        settings.vanish_ratio * fine.grand_norm,
        gate,
        tolerances.trend,
    )
    small_c_verdict = _verdict(
        coarse.small_c_estimate, fine.small_c_estimate, small_c_trend, 0.0, gate, tolerances.trend
    )
    report = ClosureReport(
        tail_verdict=tail_verdict,
        small_c_verdict=small_c_verdict,
        agree=tail_verdict == small_c_verdict and tail_verdict != Verdict.INCONCLUSIVE,
        tail_level=fine.tail_estimate,
        small_c_level=fine.small_c_estimate,
        expected_slope=expected,
        c_lo=float(fine.shifts[-1]),
        resolved=resolved,
        tail_trend=tail_trend,
        small_c_trend=small_c_trend,
        levels=levels,
    )
    logger.info(f"closure diagnostic: tail={tail_verdict.value} small_c={small_c_verdict.value} agree={report.agree}")
    return report
