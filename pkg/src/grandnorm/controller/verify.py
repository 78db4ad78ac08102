"""
Randomized invariant suites behind `grandnorm verify`.

Each suite draws its instances from numpy.random.default_rng([seed, index]) where index is
the suite's position in SUITES, so a suite's result does not depend on which other suites
run alongside it or on the thread count.
"""

import itertools
import logging
import math
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from grandnorm.config import GrandnormConfig
from grandnorm.controller.density import tail, truncate
from grandnorm.controller.exponent import conjugate
from grandnorm.controller.lebesgue import (
    embedding_constant,
    holder_constant,
    luxemburg_norm,
    modular,
    pairing,
)
from grandnorm.controller.measure_space import ball, ball_measure, critical_radii, quasi_triangle_constant
from grandnorm.controller.morrey_grand import embedding_chain_report, grand_morrey_norm, morrey_norm
from grandnorm.controller.predual import (
    block_bound,
    certify_block,
    dyadic_regroup,
    fatou_monotonicity_check,
    normalize_to_block,
    pairing_bound_check,
    pairing_constant,
    sandwich,
    script_l_norm,
    split_block,
)
from grandnorm.model.block import BlockDecomposition
from grandnorm.model.errors import ParameterRangeError
from grandnorm.model.exponent import Exponent, MorreyExponent
from grandnorm.model.field import Field
from grandnorm.model.params import GrandParams, ScriptLParams
from grandnorm.model.reports import SuiteResult
from grandnorm.model.space import QuasiMetricSpace

logger = logging.getLogger(__name__)


@dataclass
class Tally:
    """Violation count and worst observed ratio (<= 1 means the inequality held)."""

    instances: int = 0
    violations: int = 0
    worst: float = 0.0
    details: dict = field(default_factory=dict)

    def observe(self, ratio: float, ok: bool) -> None:
        self.instances += 1
        self.worst = max(self.worst, float(ratio))
        if not ok:
            self.violations += 1


SuiteBody = Callable[[np.random.Generator, int, GrandnormConfig, Tally], None]


@dataclass(frozen=True)
class Suite:
    name: str
    statement: str
    body: SuiteBody
    divisor: int = 1  # expensive suites run instances // divisor draws
    anchor: str = ""  # module operation or invariant the suite exercises


def random_space(rng: np.random.Generator, n: int, alpha: float | None = None) -> QuasiMetricSpace:
    coords = np.cumsum(rng.uniform(0.1, 1.0, n))
    weight = rng.uniform(0.1, 1.0, n)
    weight *= rng.uniform(0.5, 2.0) / weight.sum()
    if alpha is None:
        alpha = float(rng.choice([1.0, 0.5, 2.0]))
    return QuasiMetricSpace(weight=weight, coords=coords / coords[-1], alpha=alpha, label="random")


def random_exponent(rng: np.random.Generator, n: int, low: float = 1.2, high: float = 5.0) -> Exponent:
    p_minus = rng.uniform(low, high)
    return Exponent(p_minus + rng.uniform(0.0, rng.uniform(0.0, high - p_minus), n))


def random_field(rng: np.random.Generator, n: int, sparsity: float = 0.2) -> Field:
    values = rng.normal(size=n) * 10.0 ** rng.uniform(-3.0, 3.0)
    values[rng.random(n) < sparsity] = 0.0
    if not np.any(values):
        values[0] = 1.0
    return Field(values)


def _relative_excess(lhs: float, rhs: float) -> float:
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


def _luxemburg_closed_form(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        n = int(rng.integers(1, 257))
        space = random_space(rng, n)
        value = rng.uniform(1.05, 6.0)
        f = random_field(rng, n)
        norm = luxemburg_norm(space, Exponent.constant(n, value), f, config.tolerances.luxemburg)
        exact = float(np.sum(space.weight * np.abs(f.values) ** value) ** (1.0 / value))
        error = abs(norm - exact) / exact
        tally.observe(error, error <= 1e-10)


def _norm_modular(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    slack = config.tolerances.certification
    for _ in range(instances):
        n = int(rng.integers(1, 65))
        space = random_space(rng, n)
        p = random_exponent(rng, n)
        f = random_field(rng, n)
        norm = luxemburg_norm(space, p, f, config.tolerances.luxemburg)
        value = modular(space, p, f)
        # ||f|| <= 1: ||f||^p+ <= S(f) <= ||f||^p-, reversed above 1
        low, high = sorted((norm**p.minus, norm**p.plus))
        ok = low * (1 - slack) <= value <= high * (1 + slack)
        tally.observe(max(_relative_excess(low, value), _relative_excess(value, high)), ok)


def _holder(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    tol = config.tolerances.luxemburg
    for _ in range(instances):
        n = int(rng.integers(1, 65))
        space = random_space(rng, n)
        p = random_exponent(rng, n)
        f, g = random_field(rng, n), random_field(rng, n)
        bound = holder_constant(p) * luxemburg_norm(space, p, f, tol) * luxemburg_norm(space, conjugate(p), g, tol)
        value = abs(pairing(space, f, g))
        tally.observe(_relative_excess(value, bound), value <= bound * (1 + config.tolerances.certification))


def _embedding(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    tol = config.tolerances.luxemburg
    for _ in range(instances):
        n = int(rng.integers(1, 65))
        space = random_space(rng, n)
        p = random_exponent(rng, n, high=4.0)
        q = Exponent(p.values + rng.uniform(0.0, 2.0, n))
        f = random_field(rng, n)
        lhs = luxemburg_norm(space, p, f, tol)
        rhs = embedding_constant(space) * luxemburg_norm(space, q, f, tol)
        tally.observe(_relative_excess(lhs, rhs), lhs <= rhs * (1 + config.tolerances.certification))


def _quasi_triangle(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        n = int(rng.integers(3, 9))
        space = random_space(rng, n)
        constant = quasi_triangle_constant(space)
        dist = space.dist
        worst = max(
            dist[i, j] / (dist[i, k] + dist[k, j]) for i, j, k in itertools.permutations(range(n), 3)
        )
        tally.observe(worst / constant, math.isclose(constant, max(1.0, worst), rel_tol=1e-12))


def _ball_monotone(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        n = int(rng.integers(1, 33))
        space = random_space(rng, n)
        center = int(rng.integers(n))
        measures = np.array([ball_measure(space, center, r) for r in critical_radii(space, center)])
        increasing = bool(np.all(np.diff(measures) > 0))
        full = math.isclose(measures[-1], space.total_measure, rel_tol=1e-12)
        tally.observe(measures[-1] / space.total_measure, increasing and full)


def _truncation(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        n = int(rng.integers(1, 257))
        f = random_field(rng, n)
        threshold = float(np.exp(rng.uniform(-3.0, 3.0))) * max(f.sup, 1e-300)
        rebuilt = truncate(f, threshold).values + tail(f, threshold).values
        tally.observe(0.0, bool(np.array_equal(rebuilt, f.values)))


def _grand_chain(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        n = int(rng.integers(2, 13))
        space = random_space(rng, n)
        if space.total_measure > 1.0:
            space = QuasiMetricSpace(weight=space.weight / space.total_measure, coords=space.coords, label="random")
        if rng.random() < 0.5:
            p = random_exponent(rng, n, low=1.5, high=4.0)
            lam = MorreyExponent.constant(n)
        else:
            # Morrey balls compare exponents across centers; keep both constant
            p = Exponent.constant(n, rng.uniform(1.5, 4.0))
            lam = MorreyExponent.constant(n, rng.uniform(0.0, 1.0))
        params = GrandParams.geometric(rng.uniform(0.2, 3.0), p.minus, count=8)
        f = random_field(rng, n)
        c = float(rng.choice(params.shifts))
        report = embedding_chain_report(space, p, lam, params, f, c, config.tolerances.morrey)
        ratio = max(1.0 / report.left_ratio, 1.0 / report.right_ratio)
        tally.observe(ratio, report.left_holds and report.right_holds)


def _grid_refinement(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        n = int(rng.integers(1, 65))
        space = random_space(rng, n)
        p = random_exponent(rng, n, low=1.5, high=4.0)
        lam = MorreyExponent.constant(n)
        params = GrandParams.geometric(rng.uniform(0.2, 3.0), p.minus, count=8)
        f = random_field(rng, n)
        coarse = grand_morrey_norm(space, p, lam, params, f, config.tolerances.morrey)
        fine = grand_morrey_norm(space, p, lam, params.refined(), f, config.tolerances.morrey)
        tally.observe(_relative_excess(coarse, fine), coarse <= fine * (1 + config.tolerances.certification))


def _predual_setup(
    rng: np.random.Generator, config: GrandnormConfig
) -> tuple[QuasiMetricSpace, Exponent, ScriptLParams]:
    n = int(rng.integers(4, 33))
    space = random_space(rng, n)
    space = QuasiMetricSpace(weight=space.weight / space.total_measure, coords=space.coords, label="random")
    p = random_exponent(rng, n, low=1.8, high=4.0)
    a = rng.uniform(0.1, 0.9) * (p.minus - 1.0)
    theta = rng.uniform(-1.0, 3.0)
    params = ScriptLParams.dyadic(theta, a, min(config.grid.dyadic_levels, 8))
    return space, p, params


def _random_kappa(rng: np.random.Generator, params: ScriptLParams) -> float:
    return params.a * 2.0 ** -rng.uniform(0.0, 6.0)


def _block_certification(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        space, p, params = _predual_setup(rng, config)
        kappa = _random_kappa(rng, params)
        lam, block = normalize_to_block(space, p, params, random_field(rng, space.n), kappa)
        inflated = block.values.scaled(2.0)
        ok = certify_block(space, p, params, block.values, kappa, config.tolerances.certification)
        ok = ok and not certify_block(space, p, params, inflated, kappa, config.tolerances.certification)
        tally.observe(0.0 if lam else 1.0, ok)


def _split_constant(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    cert = config.tolerances.certification
    constants, ratios = [], []
    for _ in range(instances):
        space, p, params = _predual_setup(rng, config)
        kappa = _random_kappa(rng, params)
        _, block = normalize_to_block(space, p, params, random_field(rng, space.n), kappa)
        split = split_block(space, p, params, block.values, kappa)
        report = split.report
        exact = np.array_equal(split.low.values.values + split.high.values.values, block.values.values)
        certified = certify_block(space, p, params, split.low.values, report.kappa_low, cert, report.constant)
        certified = certified and certify_block(
            space, p, params, split.high.values, report.kappa_high, cert, report.constant
        )
        grid = np.linspace(report.kappa_low, report.kappa_high, 65)
        spread = float(np.max(block_bound(params, p.minus, grid))) / block_bound(params, p.minus, report.kappa_low)
        ceiling = embedding_constant(space) * spread
        constants.append(report.constant)
        ratios.append(report.norm_ratio)
        tally.observe(report.constant / ceiling, exact and certified and report.constant <= ceiling * (1 + cert))
    if constants:
        # A carries the bound ratio across the bracket; norm_ratio does not
        stable = bool(np.max(ratios) <= 2.0 * np.median(ratios))
        tally.details = {
            "max_constant": float(np.max(constants)),
            "median_constant": float(np.median(constants)),
            "max_ratio": float(np.max(ratios)),
            "median_ratio": float(np.median(ratios)),
            "stable": stable,
        }
        if not stable:
            tally.violations += 1


def _regroup(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    cert = config.tolerances.certification
    for _ in range(instances):
        space, p, params = _predual_setup(rng, config)
        terms = []
        for _ in range(int(rng.integers(1, 5))):
            lam, block = normalize_to_block(space, p, params, random_field(rng, space.n), _random_kappa(rng, params))
            terms.append((lam * rng.choice([-1.0, 1.0]), block))
        original = BlockDecomposition(tuple(terms))
        result = dyadic_regroup(space, p, params, original)
        regrouped = result.decomposition
        dyadic = all(params.dyadic_level(kappa) is not None for kappa in regrouped.kappas)
        exact = np.array_equal(regrouped.reconstruct(space.n).values, original.reconstruct(space.n).values)
        certified = all(certify_block(space, p, params, b.values, b.kappa, cert) for _, b in regrouped)
        ratio = regrouped.cost / (result.constant * original.cost)
        tally.observe(ratio, dyadic and exact and certified and ratio <= 1 + cert)


def _sandwich(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        space, p, params = _predual_setup(rng, config)
        report = sandwich(space, p, params, random_field(rng, space.n), certification=config.tolerances.certification)
        tally.observe(_relative_excess(report.lower, report.holder_constant * report.upper), report.holds)


def _pairing_bound(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        space, p, params = _predual_setup(rng, config)
        kappa = float(rng.choice(params.kappa_grid))
        _, block = normalize_to_block(space, p, params, random_field(rng, space.n), kappa)
        f = random_field(rng, space.n)
        direct = abs(pairing(space, f, block.values))
        bound = pairing_constant(p, [kappa]) * script_l_norm(space, p, params, f)
        report = pairing_bound_check(
            space, p, params, f, BlockDecomposition(((1.0, block),)), certification=config.tolerances.certification
        )
        ok = report.holds and direct <= bound * (1 + config.tolerances.certification)
        tally.observe(_relative_excess(direct, bound), ok)


def _fatou(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        space, p, params = _predual_setup(rng, config)
        f = Field(np.abs(random_field(rng, space.n).values))
        levels = np.quantile(f.values, [0.25, 0.5, 0.75, 1.0])
        sequence = [Field(np.minimum(f.values, level)) for level in levels]
        report = fatou_monotonicity_check(space, p, params, sequence, certification=config.tolerances.certification)
        tally.observe(0.0 if report.holds else 1.0, report.holds)


def _unit_modular(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        n = int(rng.integers(1, 129))
        space = random_space(rng, n)
        p = random_exponent(rng, n)
        f = random_field(rng, n)
        norm = luxemburg_norm(space, p, f, config.tolerances.luxemburg)
        error = abs(modular(space, p, Field(f.values / norm)) - 1.0)
        tally.observe(error, error <= 1e-8)


def _ball_symmetry(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    for _ in range(instances):
        n = int(rng.integers(1, 17))
        space = random_space(rng, n)
        i = int(rng.integers(n))
        row = space.distances_from(i)
        radii = np.concatenate((critical_radii(space, i), row[row > 0]))
        mismatches = 0
        for r in radii:
            inside = set(ball(space, i, r).tolist())
            mismatches += sum((j in inside) != (i in set(ball(space, j, r).tolist())) for j in range(n))
        tally.observe(float(mismatches), mismatches == 0)


def _morrey_setup(
    rng: np.random.Generator,
) -> tuple[QuasiMetricSpace, Exponent, MorreyExponent, GrandParams]:
    n = int(rng.integers(2, 13))
    space = random_space(rng, n)
    if rng.random() < 0.5:
        p = random_exponent(rng, n, low=1.5, high=4.0)
        lam = MorreyExponent.constant(n)
    else:
        p = Exponent.constant(n, rng.uniform(1.5, 4.0))
        lam = MorreyExponent.constant(n, rng.uniform(0.0, 1.0))
    return space, p, lam, GrandParams.geometric(rng.uniform(0.2, 3.0), p.minus, count=8)


def _tail_bound(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    tol = config.tolerances.morrey
    for _ in range(instances):
        space, p, lam, params = _morrey_setup(rng)
        f = random_field(rng, space.n)
        threshold = float(np.exp(rng.uniform(-2.0, 0.5))) * f.sup
        lhs = grand_morrey_norm(space, p, lam, params, tail(f, threshold), tol)
        rhs = 2.0 * grand_morrey_norm(space, p, lam, params, Field(f.values - truncate(f, threshold / 2).values), tol)
        tally.observe(_relative_excess(lhs, rhs), lhs <= rhs * (1 + config.tolerances.certification))


def _norm_axioms(rng: np.random.Generator, instances: int, config: GrandnormConfig, tally: Tally) -> None:
    tol, cert = config.tolerances.morrey, config.tolerances.certification
    for _ in range(instances):
        space, p, lam, params = _morrey_setup(rng)
        f, g = random_field(rng, space.n), random_field(rng, space.n)
        scale = float(rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-3.0, 3.0))
        worst, ok = 0.0, True
        for norm in (
            lambda h: morrey_norm(space, p, lam, h, tol),
            lambda h: grand_morrey_norm(space, p, lam, params, h, tol),
        ):
            nf, ng = norm(f), norm(g)
            scaled = norm(Field(scale * f.values))
            homogeneity = abs(scaled - abs(scale) * nf) / (abs(scale) * nf)
            total = norm(Field(f.values + g.values))
            worst = max(worst, homogeneity, _relative_excess(total, nf + ng))
            ok = ok and homogeneity <= 1e-8 and total <= (nf + ng) * (1 + cert)
        tally.observe(worst, ok)


SUITES: tuple[Suite, ...] = (
    Suite(
        "luxemburg",
        "constant-exponent Luxemburg norm equals (sum w |f|^p)^(1/p)",
        _luxemburg_closed_form,
        anchor="lebesgue.luxemburg_norm",
    ),
    Suite(
        "norm-modular",
        "norm and modular satisfy the two-sided power relations",
        _norm_modular,
        anchor="lebesgue.modular",
    ),
    Suite("holder", "|<f,g>| <= (1 + 1/p- - 1/p+) ||f||_p ||g||_p'", _holder, anchor="lebesgue.holder_constant"),
    Suite(
        "embedding",
        "||f||_p <= (1 + mu(X)) ||f||_q whenever p <= q",
        _embedding,
        anchor="lebesgue.embedding_constant",
    ),
    Suite(
        "quasi-triangle",
        "reported K bounds d(x,y) / (d(x,z) + d(z,y))",
        _quasi_triangle,
        anchor="measure_space.quasi_triangle_constant",
    ),
    Suite(
        "balls",
        "ball measures increase along critical radii up to mu(X)",
        _ball_monotone,
        anchor="measure_space.critical_radii",
    ),
    Suite("truncation", "truncate(f, N) + tail(f, N) == f", _truncation, anchor="density.truncate"),
    Suite(
        "grand-chain",
        "shifted Morrey <= c1 grand <= c1 c2 Morrey",
        _grand_chain,
        divisor=10,
        anchor="morrey_grand.embedding_chain_report",
    ),
    Suite(
        "grid-refinement",
        "refining the shift grid never lowers the grand norm",
        _grid_refinement,
        divisor=4,
        anchor="morrey_grand.grand_morrey_norm",
    ),
    Suite(
        "blocks",
        "normalized blocks certify and doubled ones do not",
        _block_certification,
        divisor=2,
        anchor="predual.certify_block",
    ),
    Suite(
        "split",
        "split parts rebuild the block and certify with A <= (1 + mu(X)) rho",
        _split_constant,
        divisor=2,
        anchor="predual.split_block",
    ),
    Suite(
        "regroup",
        "dyadic regrouping is exact, certified and inflates cost by at most A",
        _regroup,
        divisor=4,
        anchor="predual.dyadic_regroup",
    ),
    Suite("sandwich", "h_norm_lower <= c_p h_norm_upper", _sandwich, divisor=2, anchor="predual.sandwich"),
    Suite(
        "pairing",
        "|<f, b>| <= c_p ||f||_L for certified blocks b",
        _pairing_bound,
        divisor=2,
        anchor="predual.pairing_bound_check",
    ),
    Suite(
        "fatou",
        "upper bounds grow along increasing truncations and dominate lower / c_p",
        _fatou,
        divisor=4,
        anchor="predual.fatou_monotonicity_check",
    ),
    Suite("unit-modular", "modular(f / ||f||) == 1 for f != 0", _unit_modular, anchor="lebesgue.luxemburg_norm"),
    Suite(
        "ball-symmetry",
        "j in B(i, r) exactly when i in B(j, r)",
        _ball_symmetry,
        divisor=4,
        anchor="measure_space.ball",
    ),
    Suite(
        "tail-bound",
        "grand(tail(f, N)) <= 2 grand(f - truncate(f, N/2))",
        _tail_bound,
        divisor=10,
        anchor="density.tail",
    ),
    Suite(
        "norm-axioms",
        "Morrey and grand Morrey norms are absolutely homogeneous and subadditive",
        _norm_axioms,
        divisor=10,
        anchor="morrey_grand.morrey_norm",
    ),
)


def suite_names() -> list[str]:
    return [suite.name for suite in SUITES]


def select_suites(names: Sequence[str] | None) -> list[tuple[int, Suite]]:
    if not names or "all" in names:
        return list(enumerate(SUITES))
    index = {suite.name: i for i, suite in enumerate(SUITES)}
    unknown = [name for name in names if name not in index]
    if unknown:
        raise ParameterRangeError(f"unknown verify suite(s): {', '.join(unknown)}; known: {', '.join(index)}")
    return [(index[name], SUITES[index[name]]) for name in dict.fromkeys(names)]


def run_suite(index: int, suite: Suite, config: GrandnormConfig) -> SuiteResult:
    rng = np.random.default_rng([config.verify.seed, index])
    instances = max(1, config.verify.instances // suite.divisor)
    tally = Tally()
    start = time.perf_counter()
    suite.body(rng, instances, config, tally)
    logger.info(
        f"suite {suite.name}: {tally.instances} instances, {tally.violations} violations "
        f"in {time.perf_counter() - start:.2f}s"
    )
    return SuiteResult(
        name=suite.name,
        statement=suite.statement,
        anchor=suite.anchor,
        instances=tally.instances,
        violations=tally.violations,
        worst=tally.worst,
        details=tally.details,
    )


def run_suites(
    names: Sequence[str] | None = None, config: GrandnormConfig | None = None, threads: int | None = None
) -> list[SuiteResult]:
    config = config or GrandnormConfig.default()
    selected = select_suites(names)
    with ThreadPoolExecutor(max_workers=threads or config.limits.threads) as executor:
        return list(executor.map(lambda item: run_suite(item[0], item[1], config), selected))
