"""
Variable Morrey norms, grand variable-exponent Morrey norms and the embedding chain.

The Morrey sup runs over every center and every critical radius, the full ball B = X
included, so lambda == 0 collapses to the Luxemburg norm of f itself.
"""

import logging

import numpy as np

from grandnorm.controller.exponent import shift
from grandnorm.controller.lebesgue import (
    embedding_constant,
    luxemburg_norm,
    luxemburg_norms,
    restricted_norms,
)
from grandnorm.controller.measure_space import ball_table
from grandnorm.model.exponent import Exponent, MorreyExponent
from grandnorm.model.field import Field
from grandnorm.model.params import GrandParams
from grandnorm.model.reports import ChainReport, ShiftProfile
from grandnorm.model.space import QuasiMetricSpace

logger = logging.getLogger(__name__)

MORREY_TOL = 1e-10


def _morrey(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    f: Field,
    tol: float,
    ball_infimum: bool,
) -> float:
    if f.is_zero:
        return 0.0
    if lam.is_zero:
        return luxemburg_norm(space, p, f, tol)
    table = ball_table(space)
    norms = restricted_norms(space, p, f, table.orders, table.sizes, tol, rows=table.centers)
    if ball_infimum:
        last = table.sizes - 1
        lam_ball = np.minimum.accumulate(lam.values[table.orders], axis=1)[table.centers, last]
        p_ball = np.minimum.accumulate(p.values[table.orders], axis=1)[table.centers, last]
    else:
        lam_ball = lam.values[table.centers]
        p_ball = p.values[table.centers]
    return float(np.max(table.measures ** (-lam_ball / p_ball) * norms))


def morrey_norm(
    space: QuasiMetricSpace, p: Exponent, lam: MorreyExponent, f: Field, tol: float = MORREY_TOL
) -> float:
    return _morrey(space, p, lam, f, tol, ball_infimum=False)


def _grand_profile(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    params: GrandParams,
    f: Field,
    tol: float,
    ball_infimum: bool,
) -> ShiftProfile:
    params.check_against(p.minus)
    shifts = np.asarray(params.shifts)
    factors = shifts ** (params.theta / (p.minus - shifts))
    if lam.is_zero:
        norms = luxemburg_norms(space, p.values[None, :] - shifts[:, None], f.values, tol)
    else:
        norms = np.array([_morrey(space, shift(p, c), lam, f, tol, ball_infimum) for c in params.shifts])
    products = factors * norms
    best = int(np.argmax(products))
    return ShiftProfile(
        theta=params.theta,
        p_minus=p.minus,
        shifts=shifts.tolist(),
        factors=factors.tolist(),
        norms=norms.tolist(),
        products=products.tolist(),
        value=float(products[best]),
        optimal_shift=None if f.is_zero else float(shifts[best]),
    )


def grand_morrey_profile(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    params: GrandParams,
    f: Field,
    tol: float = MORREY_TOL,
) -> ShiftProfile:
    return _grand_profile(space, p, lam, params, f, tol, ball_infimum=False)


def grand_morrey_norm(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    params: GrandParams,
    f: Field,
    tol: float = MORREY_TOL,
) -> float:
    return grand_morrey_profile(space, p, lam, params, f, tol).value


def equivalent_grand_profile(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    params: GrandParams,
    f: Field,
    tol: float = MORREY_TOL,
) -> ShiftProfile:
    """Grand norm with ball-wise infima mu(B)^(-lambda-(B)/(p-(B) - c)) as prefactor."""
    return _grand_profile(space, p, lam, params, f, tol, ball_infimum=True)


def equivalent_grand_norm(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    params: GrandParams,
    f: Field,
    tol: float = MORREY_TOL,
) -> float:
    return equivalent_grand_profile(space, p, lam, params, f, tol).value


def embedding_chain_report(
    space: QuasiMetricSpace,
    p: Exponent,
    lam: MorreyExponent,
    params: GrandParams,
    f: Field,
    c: float | None = None,
    tol: float = MORREY_TOL,
) -> ChainReport:
    """
    ||f||_{p-c,lam} <= c1 ||f||_{p,lam,theta} <= c2 ||f||_{p,lam} with
    c1 = c^(-theta/(p- - c)) and c2 = max_c c^(theta/(p- - c)) (1 + mu(X)).
    """
    if c is None:
        c = params.shifts[len(params.shifts) // 2]
    profile = grand_morrey_profile(space, p, lam, params, f, tol)
    shifted = morrey_norm(space, shift(p, c), lam, f, tol)
    morrey = morrey_norm(space, p, lam, f, tol)
    c1 = c ** (-params.theta / (p.minus - c))
    c2 = max(profile.factors) * embedding_constant(space)
    slack = 1.0 + 10 * tol
    left_ratio = c1 * profile.value / shifted if shifted > 0 else None
    right_ratio = c2 * morrey / profile.value if profile.value > 0 else None
    return ChainReport(
        shift=c,
        shifted_norm=shifted,
        grand_norm=profile.value,
        morrey_norm=morrey,
        c1=c1,
        c2=c2,
        left_ratio=left_ratio,
        right_ratio=right_ratio,
        left_holds=shifted <= c1 * profile.value * slack,
        right_holds=profile.value <= c2 * morrey * slack,
    )
