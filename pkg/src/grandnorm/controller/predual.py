"""
Grand Lebesgue spaces with a closed shift range and their block predual.

For theta real and 0 < a < p- - 1 the grand norm sup over 0 < kappa <= a of
kappa^(theta/(p- - kappa)) ||f||_{p-kappa} is evaluated on the kappa grid of ScriptLParams.
A block at kappa is a function b with ||b||_{(p-kappa)'} <= kappa^(theta/(p- - kappa)).
The predual norm (infimum of sum |lambda_j| over block decompositions) is not computed
exactly; h_norm_upper and h_norm_lower bracket it, the lower one up to the pairing
constant c_p.
"""

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from grandnorm.controller.exponent import conjugate, shift
from grandnorm.controller.lebesgue import (
    DEFAULT_TOL,
    embedding_constant,
    holder_constant,
    luxemburg_norm,
    luxemburg_norms,
    pairing,
)
from grandnorm.controller.measure_space import exhaustion_indices
from grandnorm.model.block import Block, BlockDecomposition
from grandnorm.model.errors import InvalidFieldError, ParameterRangeError
from grandnorm.model.exponent import Exponent
from grandnorm.model.field import Field
from grandnorm.model.params import ScriptLParams
from grandnorm.model.reports import FatouReport, PairingReport, SandwichReport, ShiftProfile, SplitReport
from grandnorm.model.space import QuasiMetricSpace, restrict

logger = logging.getLogger(__name__)

CERTIFY_TOL = 1e-9
DEFAULT_CANDIDATE_POWERS = (1.25, 1.5, 2.0, 3.0, 4.0)


@dataclass(frozen=True, eq=False)
class SplitResult:
    low: Block  # part placed at kappa_low = 2^-l a
    high: Block  # part placed at kappa_high = 2^-l+1 a
    report: SplitReport


@dataclass(frozen=True, eq=False)
class RegroupResult:
    decomposition: BlockDecomposition
    constant: float  # max ratio of output to input cost per term


def block_bound(params: ScriptLParams, p_minus: float, kappa: float) -> float:
    return kappa ** (params.theta / (p_minus - kappa))


def _conjugate_norm(space: QuasiMetricSpace, p: Exponent, kappa: float, f: Field, tol: float) -> float:
    return luxemburg_norm(space, conjugate(shift(p, kappa)), f, tol)


def pairing_constant(p: Exponent, kappas: Sequence[float]) -> float:
    """Hoelder constant of the worst shifted exponent p - kappa over the given shifts."""
    if not kappas:
        return 1.0
    return max(holder_constant(shift(p, kappa)) for kappa in kappas)


def _kappa_norms(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    fields: NDArray[np.float64],
    tol: float,
    conjugated: bool = False,
) -> NDArray[np.float64]:
    """(fields, kappas) table of ||f||_{p-kappa}, or ||f||_{(p-kappa)'} when conjugated, in one joint solve."""
    params.check_against(p.minus)
    kappas = np.asarray(params.kappa_grid)
    rows = p.values[None, :] - kappas[:, None]
    if conjugated:
        rows = rows / (rows - 1.0)
    count = fields.shape[0]
    norms = luxemburg_norms(space, np.tile(rows, (count, 1)), np.repeat(fields, kappas.size, axis=0), tol)
    return norms.reshape(count, kappas.size)


def _script_l_factors(params: ScriptLParams, p_minus: float) -> NDArray[np.float64]:
    kappas = np.asarray(params.kappa_grid)
    return kappas ** (params.theta / (p_minus - kappas))


def script_l_profile(
    space: QuasiMetricSpace, p: Exponent, params: ScriptLParams, f: Field, tol: float = DEFAULT_TOL
) -> ShiftProfile:
    kappas = np.asarray(params.kappa_grid)
    factors = _script_l_factors(params, p.minus)
    norms = _kappa_norms(space, p, params, f.values[None, :], tol)[0]
    products = factors * norms
    best = int(np.argmax(products))
    return ShiftProfile(
        theta=params.theta,
        p_minus=p.minus,
        shifts=kappas.tolist(),
        factors=factors.tolist(),
        norms=norms.tolist(),
        products=products.tolist(),
        value=float(products[best]),
        optimal_shift=None if f.is_zero else float(kappas[best]),
    )


def script_l_norm(
    space: QuasiMetricSpace, p: Exponent, params: ScriptLParams, f: Field, tol: float = DEFAULT_TOL
) -> float:
    return script_l_profile(space, p, params, f, tol).value


def certify_block(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    b: Field,
    kappa: float,
    tol: float = CERTIFY_TOL,
    constant: float = 1.0,
) -> bool:
    """True iff ||b||_{(p-kappa)'} <= constant * kappa^(theta/(p- - kappa)) up to tol."""
    params.check_kappa(kappa)
    if b.is_zero:
        return True
    norm = _conjugate_norm(space, p, kappa, b, DEFAULT_TOL)
    return norm <= constant * block_bound(params, p.minus, kappa) * (1.0 + tol)


def normalize_to_block(
    space: QuasiMetricSpace, p: Exponent, params: ScriptLParams, g: Field, kappa: float, tol: float = DEFAULT_TOL
) -> tuple[float, Block]:
    params.check_kappa(kappa)
    if g.is_zero:
        return 0.0, Block(Field.zeros(g.n), kappa)
    lam = _conjugate_norm(space, p, kappa, g, tol) / block_bound(params, p.minus, kappa)
    return lam, Block(g.scaled(1.0 / lam), kappa)


def _split_constant(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    low: Field,
    high: Field,
    kappa_low: float,
    kappa_high: float,
    tol: float,
) -> tuple[float, float, float]:
    """(A, low norm, high norm) for a split with low placed at kappa_low and high at kappa_high."""
    low_norm = 0.0 if low.is_zero else _conjugate_norm(space, p, kappa_low, low, tol)
    high_norm = 0.0 if high.is_zero else _conjugate_norm(space, p, kappa_high, high, tol)
    constant = max(
        low_norm / block_bound(params, p.minus, kappa_low),
        high_norm / block_bound(params, p.minus, kappa_high),
    )
    return constant, low_norm, high_norm


def split_block(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    b: Field,
    kappa: float,
    tol: float = DEFAULT_TOL,
    allow_trivial: bool = True,
) -> SplitResult:
    """
    Write a block at kappa, 2^-l a <= kappa <= 2^-l+1 a, as a part at 2^-l a plus a part at 2^-l+1 a.

    The threshold split sends b * [|b| > 1] to kappa_low and b * [|b| <= 1] to the larger
    conjugate exponent at kappa_high, so a block with |b| <= 1 leaves nothing at kappa_low.
    With allow_trivial the whole of b goes to kappa_low when that already costs at most
    1 + mu(X), or whenever it is the cheaper split. The report also carries the larger part
    norm relative to ||b||_{(p-kappa)'}, which does not grow with the bound ratio between kappas.
    """
    params.check_against(p.minus)
    level = params.bracket_level(kappa)
    kappa_low = math.ldexp(params.a, -level)
    kappa_high = math.ldexp(params.a, 1 - level)
    zero = Field.zeros(b.n)

    large = Field(np.where(np.abs(b.values) > 1.0, b.values, 0.0))
    small = Field(np.where(np.abs(b.values) > 1.0, 0.0, b.values))
    threshold = _split_constant(space, p, params, large, small, kappa_low, kappa_high, tol)
    parts, strategy, (constant, low_norm, high_norm) = (large, small), "threshold", threshold

    if allow_trivial:
        trivial = _split_constant(space, p, params, b, zero, kappa_low, kappa_high, tol)
        if trivial[0] <= embedding_constant(space) or trivial[0] <= threshold[0]:
            parts, strategy, (constant, low_norm, high_norm) = (b, zero), "trivial", trivial
    block_norm = 0.0 if b.is_zero else _conjugate_norm(space, p, kappa, b, tol)

    report = SplitReport(
        level=level,
        kappa_low=kappa_low,
        kappa_high=kappa_high,
        strategy=strategy,
        constant=constant,
        low_norm=low_norm,
        high_norm=high_norm,
        low_bound=block_bound(params, p.minus, kappa_low),
        high_bound=block_bound(params, p.minus, kappa_high),
        block_norm=block_norm,
        norm_ratio=max(low_norm, high_norm) / block_norm if block_norm > 0 else 0.0,
    )
    logger.debug(f"split at kappa={kappa:.6g} (level {level}): {strategy}, A={constant:.6g}")
    return SplitResult(low=Block(parts[0], kappa_low), high=Block(parts[1], kappa_high), report=report)


def _renormalized(lam: float, part: Field, kappa: float, ratio: float) -> tuple[float, Block]:
    # powers of two keep lam * values bitwise unchanged
    exponent = math.ceil(math.log2(ratio))
    return math.ldexp(lam, exponent), Block(Field(np.ldexp(part.values, -exponent)), kappa)


def dyadic_regroup(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    decomposition: BlockDecomposition,
    tol: float = DEFAULT_TOL,
    allow_trivial: bool = True,
) -> RegroupResult:
    """
    Equivalent decomposition whose blocks all sit at dyadic kappa = 2^-l a.

    Terms already at a dyadic kappa are kept. Every other term is split and each nonzero
    part rescaled by a power of two into a certified block, in place and in order.
    """
    terms: list[tuple[float, Block]] = []
    constant = 1.0
    for lam, block in decomposition:
        if params.dyadic_level(block.kappa) is not None:
            terms.append((lam, block))
            continue
        split = split_block(space, p, params, block.values, block.kappa, tol, allow_trivial)
        inflation = 0.0
        for part, norm, bound in (
            (split.low, split.report.low_norm, split.report.low_bound),
            (split.high, split.report.high_norm, split.report.high_bound),
        ):
            if part.values.is_zero:
                continue
            new_lam, new_block = _renormalized(lam, part.values, part.kappa, norm / bound)
            terms.append((new_lam, new_block))
            if lam != 0:
                inflation += abs(new_lam / lam)
        constant = max(constant, inflation)
    logger.debug(f"regrouped {len(decomposition)} terms into {len(terms)}, cost inflation <= {constant:.6g}")
    return RegroupResult(decomposition=BlockDecomposition(tuple(terms)), constant=constant)


def h_norm_upper_profile(
    space: QuasiMetricSpace, p: Exponent, params: ScriptLParams, f: Field, tol: float = DEFAULT_TOL
) -> ShiftProfile:
    """Single-block costs ||f||_{(p-kappa)'} kappa^(-theta/(p- - kappa)) over the kappa grid."""
    kappas = np.asarray(params.kappa_grid)
    factors = 1.0 / _script_l_factors(params, p.minus)
    norms = _kappa_norms(space, p, params, f.values[None, :], tol, conjugated=True)[0]
    products = factors * norms
    best = int(np.argmin(products))
    return ShiftProfile(
        theta=params.theta,
        p_minus=p.minus,
        shifts=kappas.tolist(),
        factors=factors.tolist(),
        norms=norms.tolist(),
        products=products.tolist(),
        value=float(products[best]),
        optimal_shift=None if f.is_zero else float(kappas[best]),
    )


def h_norm_upper(
    space: QuasiMetricSpace, p: Exponent, params: ScriptLParams, f: Field, tol: float = DEFAULT_TOL
) -> float:
    return h_norm_upper_profile(space, p, params, f, tol).value


def default_candidates(f: Field, powers: Sequence[float] = DEFAULT_CANDIDATE_POWERS) -> list[Field]:
    """sign(f) |f|^(r-1) for each r in powers."""
    magnitude = np.abs(f.values)
    support = magnitude > 0
    candidates = []
    for r in powers:
        values = np.zeros(f.n)
        values[support] = np.sign(f.values[support]) * magnitude[support] ** (r - 1.0)
        candidates.append(Field(values))
    return candidates


def h_norm_lower(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    f: Field,
    candidates: Sequence[Field] | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """max over candidates g of |<f, g>| / ||g||_L; at most c_p times the predual norm of f."""
    candidates = default_candidates(f) if candidates is None else list(candidates)
    return _h_lower_values(space, p, params, [f], [candidates], tol)[0]


def _h_lower_values(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    fields: Sequence[Field],
    candidate_sets: Sequence[Sequence[Field]],
    tol: float,
) -> list[float]:
    """h_norm_lower of every field against its own candidates, all script-L norms solved together."""
    for f, candidates in zip(fields, candidate_sets, strict=True):
        if not candidates:
            raise ParameterRangeError("h_norm_lower needs at least one candidate")
        if any(g.n != f.n for g in candidates):
            raise InvalidFieldError("candidate length does not match the field")
    stacked = np.array([g.values for candidates in candidate_sets for g in candidates])
    norms = np.max(_script_l_factors(params, p.minus) * _kappa_norms(space, p, params, stacked, tol), axis=1)
    values, start = [], 0
    for f, candidates in zip(fields, candidate_sets, strict=True):
        best = 0.0
        for g, norm in zip(candidates, norms[start : start + len(candidates)], strict=True):
            if norm > 0:
                best = max(best, abs(pairing(space, f, g)) / norm)
        values.append(best)
        start += len(candidates)
    return values


def sandwich(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    f: Field,
    candidates: Sequence[Field] | None = None,
    tol: float = DEFAULT_TOL,
    certification: float = CERTIFY_TOL,
) -> SandwichReport:
    upper = h_norm_upper(space, p, params, f, tol)
    lower = h_norm_lower(space, p, params, f, candidates, tol)
    c_p = pairing_constant(p, params.kappa_grid)
    return SandwichReport(
        upper=upper,
        lower=lower,
        holder_constant=c_p,
        holds=lower <= c_p * upper * (1.0 + certification),
    )


def pairing_bound_check(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    f: Field,
    decomposition: BlockDecomposition,
    tol: float = DEFAULT_TOL,
    certification: float = CERTIFY_TOL,
) -> PairingReport:
    """|<f, sum lambda_j b_j>| <= c_p ||f||_L cost, with ||f||_L taken over the grid and the block kappas."""
    for kappa in decomposition.kappas:
        params.check_kappa(kappa)
    kappas = sorted(set(params.kappa_grid) | set(decomposition.kappas))
    merged = ScriptLParams(theta=params.theta, a=params.a, kappa_grid=tuple(kappas))
    value = pairing(space, f, decomposition.reconstruct(f.n)) if len(decomposition) else 0.0
    norm = script_l_norm(space, p, merged, f, tol)
    c_p = pairing_constant(p, decomposition.kappas)
    bound = c_p * norm * decomposition.cost
    return PairingReport(
        pairing=value,
        bound=bound,
        slack=bound - abs(value),
        holder_constant=c_p,
        script_l_norm=norm,
        cost=decomposition.cost,
        holds=abs(value) <= bound * (1.0 + certification),
    )


def fatou_monotonicity_check(
    space: QuasiMetricSpace,
    p: Exponent,
    params: ScriptLParams,
    f_sequence: Sequence[Field],
    candidates_of=default_candidates,
    tol: float = DEFAULT_TOL,
    certification: float = CERTIFY_TOL,
) -> FatouReport:
    """Upper bounds along 0 <= f_1 <= f_2 <= ... must not decrease and must dominate lower / c_p."""
    sequence = list(f_sequence)
    if not sequence:
        raise ParameterRangeError("Fatou check needs a nonempty sequence")
    if any(np.any(f.values < 0) for f in sequence):
        raise ParameterRangeError("Fatou sequence must be nonnegative")
    if any(np.any(b.values < a.values) for a, b in zip(sequence, sequence[1:], strict=False)):
        raise ParameterRangeError("Fatou sequence must be pointwise nondecreasing")
    stacked = np.array([f.values for f in sequence])
    costs = _kappa_norms(space, p, params, stacked, tol, conjugated=True) / _script_l_factors(params, p.minus)
    upper = np.min(costs, axis=1).tolist()
    lower = _h_lower_values(space, p, params, sequence, [list(candidates_of(f)) for f in sequence], tol)
    c_p = pairing_constant(p, params.kappa_grid)
    monotone = all(b >= a * (1.0 - certification) for a, b in zip(upper, upper[1:], strict=False))
    dominated = all(lo <= c_p * up * (1.0 + certification) for lo, up in zip(lower, upper, strict=True))
    return FatouReport(
        upper_profile=upper, lower_profile=lower, holder_constant=c_p, monotone=monotone, dominated=dominated
    )


def exhaustion_levels(
    space: QuasiMetricSpace, p: Exponent, f: Field, levels: int, anchor: int = 0
) -> Iterator[tuple[QuasiMetricSpace, Exponent, Field]]:
    """Nested finite pieces X_j with p and f restricted to them."""
    for idx in exhaustion_indices(space, levels, anchor):
        if idx.size == space.n:
            yield space, p, f
        else:
            yield restrict(space, idx), Exponent(p.values[idx]), Field(f.values[idx])
