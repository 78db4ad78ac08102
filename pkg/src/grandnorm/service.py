"""
Orchestration layer between the command line and the controllers.

Every method takes the raw command-line sources (generator strings or file paths), loads
the inputs, runs one computation and returns a plain JSON-ready dict.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from contextlib import contextmanager

from grandnorm.config import GrandnormConfig
from grandnorm.controller.density import closure_diagnostic
from grandnorm.controller.exponent import regularity_report
from grandnorm.controller.lebesgue import embedding_constant, luxemburg_norm, modular
from grandnorm.controller.measure_space import space_report
from grandnorm.controller.morrey_grand import (
    embedding_chain_report,
    equivalent_grand_profile,
    grand_morrey_profile,
    morrey_norm,
)
from grandnorm.controller.predual import (
    dyadic_regroup,
    exhaustion_levels,
    h_norm_upper_profile,
    normalize_to_block,
    pairing_bound_check,
    sandwich,
    script_l_profile,
    split_block,
)
from grandnorm.controller.verify import run_suites
from grandnorm.model.block import BlockDecomposition
from grandnorm.model.params import GrandParams, ScriptLParams
from grandnorm.model.space import QuasiMetricSpace
from grandnorm.utils.parsing import (
    parse_exponent,
    parse_family,
    parse_field,
    parse_kappa_grid,
    parse_lambda,
    parse_levels,
    parse_space,
)

logger = logging.getLogger(__name__)


def _space_summary(space: QuasiMetricSpace) -> dict[str, object]:
    return {"label": space.label, "n": space.n, "total_measure": space.total_measure}


class ReportService:
    """
    Loads inputs according to the run configuration and assembles report dicts.
    """

    def __init__(self, config: GrandnormConfig | None = None) -> None:
        self.config = config or GrandnormConfig.default()

    @property
    def _bump(self) -> float:
        return self.config.tolerances.radius_bump

    @contextmanager
    def _timed(self, command: str):
        start = time.perf_counter()
        logger.info(f"{command}: start")
        yield
        logger.info(f"{command}: done in {(time.perf_counter() - start) * 1000:.1f} ms")

    def _grand_params(self, theta: float, p_minus: float) -> GrandParams:
        return GrandParams.geometric(theta, p_minus, self.config.grid.count, self.config.grid.offset)

    def _script_l_params(self, theta: float, a: float, grid: str | None) -> ScriptLParams:
        if grid is None:
            return ScriptLParams.dyadic(theta, a, self.config.grid.dyadic_levels)
        return parse_kappa_grid(grid, theta, a)

    # norms

    def lebesgue(self, space_src: str, exponent_src: str, function_src: str) -> dict[str, object]:
        with self._timed("norm lebesgue"):
            space = parse_space(space_src, self._bump)
            p, f = parse_exponent(exponent_src, space), parse_field(function_src, space)
            norm = luxemburg_norm(space, p, f, self.config.tolerances.luxemburg)
            return {
                "command": "norm lebesgue",
                "space": _space_summary(space),
                "p_minus": p.minus,
                "p_plus": p.plus,
                "modular": modular(space, p, f),
                "norm": norm,
            }

    def morrey(self, space_src: str, exponent_src: str, lambda_src: str | None, function_src: str) -> dict[str, object]:
        with self._timed("norm morrey"):
            space = parse_space(space_src, self._bump)
            p, lam = parse_exponent(exponent_src, space), parse_lambda(lambda_src, space)
            f = parse_field(function_src, space)
            return {
                "command": "norm morrey",
                "space": _space_summary(space),
                "norm": morrey_norm(space, p, lam, f, self.config.tolerances.morrey),
            }

    def grand(
        self,
        space_src: str,
        exponent_src: str,
        lambda_src: str | None,
        function_src: str,
        theta: float,
        equivalent: bool = False,
    ) -> dict[str, object]:
        command = "norm equivalent" if equivalent else "norm grand"
        with self._timed(command):
            space = parse_space(space_src, self._bump)
            p, lam = parse_exponent(exponent_src, space), parse_lambda(lambda_src, space)
            f = parse_field(function_src, space)
            profile_of = equivalent_grand_profile if equivalent else grand_morrey_profile
            profile = profile_of(space, p, lam, self._grand_params(theta, p.minus), f, self.config.tolerances.morrey)
            summary = _space_summary(space)
            return {"command": command, "space": summary, "norm": profile.value, "profile": profile.to_dict()}

    def chain(
        self,
        space_src: str,
        exponent_src: str,
        lambda_src: str | None,
        function_src: str,
        theta: float,
        shift: float | None = None,
    ) -> dict[str, object]:
        with self._timed("norm chain"):
            space = parse_space(space_src, self._bump)
            p, lam = parse_exponent(exponent_src, space), parse_lambda(lambda_src, space)
            f = parse_field(function_src, space)
            params = self._grand_params(theta, p.minus)
            report = embedding_chain_report(space, p, lam, params, f, shift, self.config.tolerances.morrey)
            return {"command": "norm chain", "space": _space_summary(space), "chain": report.to_dict()}

    # diagnostics

    def space(self, space_src: str, with_triangle: bool = True) -> dict[str, object]:
        with self._timed("diag space"):
            space = parse_space(space_src, self._bump)
            return {"command": "diag space", "report": space_report(space, with_triangle).to_dict()}

    def exponent(self, space_src: str, exponent_src: str, theta: float | None = None) -> dict[str, object]:
        with self._timed("diag exponent"):
            space = parse_space(space_src, self._bump)
            p = parse_exponent(exponent_src, space)
            params = self._grand_params(theta, p.minus) if theta is not None else None
            report = regularity_report(space, p, params)
            return {"command": "diag exponent", "space": _space_summary(space), "report": report.to_dict()}

    def density(
        self,
        family: str,
        levels: str,
        exponent_src: str,
        lambda_src: str | None,
        witness: str,
        theta: float,
    ) -> dict[str, object]:
        with self._timed("diag density"):
            spaces = parse_family(family, parse_levels(levels), self._bump)
            report = closure_diagnostic(
                spaces,
                lambda space: parse_exponent(exponent_src, space),
                lambda space: parse_lambda(lambda_src, space),
                theta,
                lambda space: parse_field(witness, space),
                self.config.density,
                self.config.tolerances,
                self.config.grid,
                self.config.limits.threads,
            )
            return {"command": "diag density", "family": family, "witness": witness, "report": report.to_dict()}

    # predual

    def script_l(
        self,
        space_src: str,
        exponent_src: str,
        function_src: str,
        theta: float,
        a: float,
        grid: str | None = None,
        exhaustion: int | None = None,
    ) -> dict[str, object]:
        with self._timed("predual scriptL"):
            space = parse_space(space_src, self._bump)
            p, f = parse_exponent(exponent_src, space), parse_field(function_src, space)
            params = self._script_l_params(theta, a, grid)
            tol = self.config.tolerances.luxemburg
            profile = script_l_profile(space, p, params, f, tol)
            report = {
                "command": "predual scriptL",
                "space": _space_summary(space),
                "norm": profile.value,
                "profile": profile.to_dict(),
            }
            if exhaustion:
                report["exhaustion"] = [
                    {**_space_summary(sub), "norm": script_l_profile(sub, sub_p, params, sub_f, tol).value}
                    for sub, sub_p, sub_f in exhaustion_levels(space, p, f, exhaustion)
                ]
            return report

    def hnorm(
        self,
        space_src: str,
        exponent_src: str,
        function_src: str,
        theta: float,
        a: float,
        grid: str | None = None,
        exhaustion: int | None = None,
    ) -> dict[str, object]:
        with self._timed("predual hnorm"):
            space = parse_space(space_src, self._bump)
            p, f = parse_exponent(exponent_src, space), parse_field(function_src, space)
            params = self._script_l_params(theta, a, grid)
            tol, cert = self.config.tolerances.luxemburg, self.config.tolerances.certification
            report = {
                "command": "predual hnorm",
                "space": _space_summary(space),
                "sandwich": sandwich(space, p, params, f, tol=tol, certification=cert).to_dict(),
                "upper_profile": h_norm_upper_profile(space, p, params, f, tol).to_dict(),
            }
            if exhaustion:
                report["exhaustion"] = [
                    {
                        **_space_summary(sub),
                        **sandwich(sub, sub_p, params, sub_f, tol=tol, certification=cert).to_dict(),
                    }
                    for sub, sub_p, sub_f in exhaustion_levels(space, p, f, exhaustion)
                ]
            return report

    def pair(
        self,
        space_src: str,
        exponent_src: str,
        function_src: str,
        block_src: str,
        theta: float,
        a: float,
        kappa: float | None = None,
        grid: str | None = None,
    ) -> dict[str, object]:
        with self._timed("predual pair"):
            space = parse_space(space_src, self._bump)
            p = parse_exponent(exponent_src, space)
            f, g = parse_field(function_src, space), parse_field(block_src, space)
            params = self._script_l_params(theta, a, grid)
            kappa = a if kappa is None else kappa
            lam, block = normalize_to_block(space, p, params, g, kappa, self.config.tolerances.luxemburg)
            decomposition = BlockDecomposition(((lam, block),))
            report = pairing_bound_check(
                space,
                p,
                params,
                f,
                decomposition,
                self.config.tolerances.luxemburg,
                self.config.tolerances.certification,
            )
            return {
                "command": "predual pair",
                "space": _space_summary(space),
                "ledger": [{"lambda": lam, "kappa": kappa}],
                "report": report.to_dict(),
            }

    def split(
        self,
        space_src: str,
        exponent_src: str,
        block_src: str,
        theta: float,
        a: float,
        kappa: float,
        grid: str | None = None,
    ) -> dict[str, object]:
        with self._timed("predual split"):
            space = parse_space(space_src, self._bump)
            p, g = parse_exponent(exponent_src, space), parse_field(block_src, space)
            params = self._script_l_params(theta, a, grid)
            tol = self.config.tolerances.luxemburg
            lam, block = normalize_to_block(space, p, params, g, kappa, tol)
            split = split_block(space, p, params, block.values, kappa, tol)
            regrouped = dyadic_regroup(space, p, params, BlockDecomposition(((lam, block),)), tol)
            return {
                "command": "predual split",
                "space": _space_summary(space),
                "lambda": lam,
                "split": split.report.to_dict(),
                "embedding_constant": embedding_constant(space),
                "regrouped": {
                    "constant": regrouped.constant,
                    "cost": regrouped.decomposition.cost,
                    "ledger": [{"lambda": t, "kappa": b.kappa} for t, b in regrouped.decomposition],
                },
            }

    # verification

    def verify(self, names: Sequence[str] | None = None) -> dict[str, object]:
        with self._timed("verify"):
            results = run_suites(names, self.config, self.config.limits.threads)
            return {
                "command": "verify",
                "seed": self.config.verify.seed,
                "instances": self.config.verify.instances,
                "passed": all(result.passed for result in results),
                "suites": [{**result.to_dict(), "passed": result.passed} for result in results],
            }
