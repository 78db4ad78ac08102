"""
Modular, Luxemburg norm and pairing of variable Lebesgue spaces.

Modulars are evaluated in log space: sum_i exp(ln w_i + p_i (ln|f_i| - t)) with t = ln(lambda),
zero samples dropped before the log. The Luxemburg norm is the root of t -> ln S(f e^-t)
found by bisection on t, which is strictly decreasing with slope at most -p-.
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import bisect
from scipy.special import logsumexp

from grandnorm.model.errors import ConvergenceError, InvalidFieldError, ParameterRangeError
from grandnorm.model.exponent import Exponent
from grandnorm.model.field import Field
from grandnorm.model.space import QuasiMetricSpace

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
MAX_ITERATIONS = 200
BRACKET_MARGIN = 1e-6  # widening of the norm-modular bracket, in ln(lambda)


def _check_shapes(space: QuasiMetricSpace, p: Exponent | None, *fields: Field) -> None:
    for f in fields:
        if f.n != space.n:
            raise InvalidFieldError(f"field has {f.n} samples, space has {space.n} points")
    if p is not None and p.n != space.n:
        raise InvalidFieldError(f"exponent has {p.n} values, space has {space.n} points")


def _log_terms(space: QuasiMetricSpace, p: Exponent, f: Field) -> tuple[NDArray, NDArray]:
    """(ln w + p ln|f|, p) restricted to the support of f."""
    support = f.values != 0
    exponent = p.values[support]
    return np.log(space.weight[support]) + exponent * np.log(np.abs(f.values[support])), exponent


def _log_bracket(log_modular: float, p_minus: float, p_plus: float) -> tuple[float, float]:
    """Bracket for ln||f|| from the norm-modular relations."""
    if log_modular <= 0:
        return log_modular / p_minus - BRACKET_MARGIN, log_modular / p_plus + BRACKET_MARGIN
    return log_modular / p_plus - BRACKET_MARGIN, log_modular / p_minus + BRACKET_MARGIN


def modular(space: QuasiMetricSpace, p: Exponent, f: Field) -> float:
    _check_shapes(space, p, f)
    if f.is_zero:
        return 0.0
    log_base, _ = _log_terms(space, p, f)
    return float(np.exp(logsumexp(log_base)))


def luxemburg_norm(space: QuasiMetricSpace, p: Exponent, f: Field, tol: float = DEFAULT_TOL) -> float:
    if not tol > 0:
        raise ParameterRangeError(f"tolerance must be positive, got {tol}")
    _check_shapes(space, p, f)
    if f.is_zero:
        return 0.0
    log_base, exponent = _log_terms(space, p, f)

    def log_modular(t: float) -> float:
        return float(logsumexp(log_base - exponent * t))

    low, high = _log_bracket(log_modular(0.0), float(np.min(exponent)), float(np.max(exponent)))
    try:
        root = bisect(log_modular, low, high, xtol=tol, maxiter=MAX_ITERATIONS)
    except (RuntimeError, ValueError) as e:
        raise ConvergenceError(f"Luxemburg bisection failed on [{low}, {high}]: {e}") from e
    return math.exp(root)


def _bisect_rows(base: NDArray, exponent: NDArray, tol: float) -> NDArray[np.float64]:
    """Joint bisection of ln||.|| for the rows of (ln w + p ln|f|, p); -inf entries are outside the row."""
    norms = np.zeros(base.shape[0])
    live = np.any(np.isfinite(base), axis=1)
    if not np.any(live):
        return norms
    base, exponent = base[live], exponent[live]
    log_modular = logsumexp(base, axis=1)
    finite = np.isfinite(base)
    p_low = np.min(np.where(finite, exponent, np.inf), axis=1)
    p_high = np.max(np.where(finite, exponent, -np.inf), axis=1)
    low = np.where(log_modular <= 0, log_modular / p_low, log_modular / p_high) - BRACKET_MARGIN
    high = np.where(log_modular <= 0, log_modular / p_high, log_modular / p_low) + BRACKET_MARGIN
    for _ in range(MAX_ITERATIONS):
        if np.max(high - low) <= tol:
            break
        middle = 0.5 * (low + high)
        above = logsumexp(base - exponent * middle[:, None], axis=1) > 0
        low = np.where(above, middle, low)
        high = np.where(above, high, middle)
    else:
        raise ConvergenceError(f"joint Luxemburg bisection did not reach tolerance {tol}")
    norms[live] = np.exp(0.5 * (low + high))
    return norms


def luxemburg_norms(
    space: QuasiMetricSpace,
    exponents: NDArray[np.float64],
    fields: NDArray[np.float64],
    tol: float = DEFAULT_TOL,
    chunk: int = 1 << 22,
) -> NDArray[np.float64]:
    """
    Luxemburg norms of the pairs (exponents[k], fields[k]) on one space, bisected jointly.

    Either array may be a single row, broadcast against the other.
    """
    if not tol > 0:
        raise ParameterRangeError(f"tolerance must be positive, got {tol}")
    exponents, fields = np.broadcast_arrays(np.atleast_2d(exponents), np.atleast_2d(fields))
    if exponents.shape[1] != space.n:
        raise InvalidFieldError(f"rows have {exponents.shape[1]} samples, space has {space.n} points")
    if np.any(exponents < 1) or not np.all(np.isfinite(exponents)):
        raise ParameterRangeError("exponents must be finite and at least 1")
    count = exponents.shape[0]
    norms = np.zeros(count)
    log_weight = np.log(space.weight)
    rows_per_chunk = max(1, chunk // space.n)
    for start in range(0, count, rows_per_chunk):
        rows = slice(start, min(start + rows_per_chunk, count))
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(fields[rows]))
        exponent = exponents[rows]
        base = np.where(np.isfinite(log_abs), log_weight + exponent * log_abs, -np.inf)
        norms[rows] = _bisect_rows(base, exponent, tol)
    return norms


def _prefix_norms(
    log_weight: NDArray, log_abs: NDArray, q: float, orders: NDArray[np.intp], chunk: int
) -> NDArray[np.float64]:
    """(sum_{j <= k} w |f|^q)^(1/q) along every row of orders, the exact norm for constant q."""
    count, width = orders.shape
    prefix = np.empty((count, width))
    rows_per_chunk = max(1, chunk // max(width, 1))
    for start in range(0, count, rows_per_chunk):
        rows = slice(start, min(start + rows_per_chunk, count))
        order = orders[rows]
        base = log_weight[order] + q * log_abs[order]
        prefix[rows] = np.logaddexp.accumulate(base, axis=1) / q
    return prefix


def restricted_norms(
    space: QuasiMetricSpace,
    p: Exponent,
    f: Field,
    orders: NDArray[np.intp],
    sizes: NDArray[np.intp],
    tol: float = DEFAULT_TOL,
    chunk: int = 1 << 22,
    rows: NDArray[np.intp] | None = None,
) -> NDArray[np.float64]:
    """
    Luxemburg norms of f restricted to prefix sets orders[rows[k], :sizes[k]], bisected jointly.

    rows defaults to 0, 1, ... so that orders and sizes run in parallel. Only chunk entries of
    orders are gathered at a time; a constant exponent reads the norms off running log-sums.
    """
    _check_shapes(space, p, f)
    if rows is None:
        rows = np.arange(sizes.size)
    width = orders.shape[1]
    log_weight = np.log(space.weight)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(f.values))
    log_abs = np.where(np.isfinite(log_abs), log_abs, -np.inf)
    if p.minus == p.plus:
        prefix = _prefix_norms(log_weight, log_abs, p.minus, orders, chunk)
        last = np.maximum(sizes - 1, 0)
        return np.where(sizes > 0, np.exp(prefix[rows, last]), 0.0)

    count = sizes.size
    norms = np.zeros(count)
    rows_per_chunk = max(1, chunk // max(width, 1))
    columns = np.arange(width)
    for start in range(0, count, rows_per_chunk):
        block = slice(start, min(start + rows_per_chunk, count))
        order = orders[rows[block]]
        inside = columns[None, :] < sizes[block][:, None]
        exponent = p.values[order]
        base = np.where(inside, log_weight[order] + exponent * log_abs[order], -np.inf)
        norms[block] = _bisect_rows(base, exponent, tol)
    return norms


def pairing(space: QuasiMetricSpace, f: Field, g: Field) -> float:
    _check_shapes(space, None, f, g)
    return float(np.sum(space.weight * f.values * g.values))


def holder_constant(p: Exponent) -> float:
    return 1.0 + 1.0 / p.minus - 1.0 / p.plus


def embedding_constant(space: QuasiMetricSpace) -> float:
    return 1.0 + space.total_measure
