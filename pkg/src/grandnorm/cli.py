"""
grandnorm command line.

Exit codes: 0 on success, 1 when a verify suite records a violation, 2 on input errors
(bad flags, malformed files, invalid spaces, exponents or parameters).
"""

import csv
import functools
import io
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import click

from grandnorm.config import LOG_LEVELS, ConfigError, GrandnormConfig
from grandnorm.controller.verify import SUITES
from grandnorm.model.errors import GrandnormError
from grandnorm.service import ReportService
from grandnorm.utils.logging import LoggingLevels, init_logging, set_logging_levels
from grandnorm.utils.version import get_version

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2


def _scalar(value: object) -> bool:
    return value is None or isinstance(value, str | int | float | bool)


def csv_rows(report: dict, prefix: str = "") -> list[dict[str, object]]:
    """
    Flat projection of a report: parallel numeric lists become table rows, lists of
    records become one row each, remaining scalars are repeated on every row.
    """
    scalars = {f"{prefix}{k}": v for k, v in report.items() if _scalar(v)}
    rows: list[dict[str, object]] = []
    columns = {k: v for k, v in report.items() if isinstance(v, list) and v and all(_scalar(x) for x in v)}
    if columns:
        length = max(len(v) for v in columns.values())
        parallel = {k: v for k, v in columns.items() if len(v) == length}
        for i in range(length):
            rows.append({**scalars, **{f"{prefix}{k}": v[i] for k, v in parallel.items()}})
    for key, value in report.items():
        if isinstance(value, dict):
            rows.extend({**scalars, **row} for row in csv_rows(value, f"{prefix}{key}."))
        elif isinstance(value, list) and value and all(isinstance(x, dict) for x in value):
            for index, item in enumerate(value):
                item_rows = csv_rows(item, f"{prefix}{key}.")
                rows.extend({**scalars, f"{prefix}{key}.index": index, **row} for row in item_rows)
    return rows or [scalars]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"
    rows = csv_rows(report)
    fields = sorted({key for row in rows for key in row})
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _emit(ctx: click.Context, report: dict) -> None:
    text = render(report, ctx.obj["format"])
    out: Path | None = ctx.obj["out"]
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info(f"report written to {out}")


def _service(ctx: click.Context) -> ReportService:
    return ctx.obj["service"]


def _config(ctx: click.Context) -> GrandnormConfig:
    return _service(ctx).config


def report_options(func: Callable) -> Callable:
    """--out, --format and --tol for every command that writes a report."""

    @click.option("--tol", type=float, default=None, help="Bisection tolerance on ln(norm) (default 1e-12).")
    @click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
    @click.option(
        "--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Report file (default stdout)."
    )
    @functools.wraps(func)
    def wrapper(*args, out: Path | None, fmt: str, tol: float | None, **kwargs):
        ctx = click.get_current_context()
        ctx.obj.update(out=out, format=fmt)
        if tol is not None:
            if not tol > 0:
                raise ConfigError("`--tol` must be positive.")
            tolerances = _config(ctx).tolerances
            tolerances.luxemburg = tol
            tolerances.morrey = max(tol, tolerances.morrey)
        return func(*args, **kwargs)

    return wrapper


def grid_option(func: Callable) -> Callable:
    """--grid N: number of points of the c-grid."""

    @click.option(
        "--grid", "grid_count", type=click.IntRange(min=2), default=None, help="Points in the c-grid (default 64)."
    )
    @functools.wraps(func)
    def wrapper(*args, grid_count: int | None, **kwargs):
        if grid_count is not None:
            _config(click.get_current_context()).grid.count = grid_count
        return func(*args, **kwargs)

    return wrapper


SPACE = click.option(
    "--space", required=True, help="Space file or generator (dyadic:L, graded:L,m, uniform:n,len, snowflake:L,alpha)."
)
EXPONENT = click.option(
    "--exponent", required=True, help="Exponent file or generator (const:v, affine:a,b, jump:x0,v1,v2)."
)
LAMBDA = click.option("--lambda", "lambda_", default=None, help="Morrey exponent file or generator (default const:0).")
FUNCTION = click.option("--function", required=True, help="Field file or generator (power:alpha, const:v).")
THETA = click.option("--theta", type=float, required=True, help="Temper exponent theta.")
CAP = click.option("--a", "a", type=float, required=True, help="Closed shift cap a, 0 < a < p- - 1.")
KAPPA_GRID = click.option(
    "--grid", "kgrid", default=None, help="kappa grid: dyadic:L or a comma list (default dyadic:20)."
)
EXHAUSTION = click.option(
    "--exhaustion", type=click.IntRange(min=1), default=None, help="Also report on K nested finite subspaces."
)


@click.group()
@click.version_option(version=get_version(), prog_name="grandnorm")
@click.option(
    "--config",
    "-c",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, readable=True, path_type=Path),
    help="Path to a YAML run configuration.",
)
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None)
@click.pass_context
def cli(ctx: click.Context, config: Path | None, log_level: str | None) -> None:
    """
    Grand variable-exponent Lebesgue and Morrey norms on finite quasi-metric measure spaces.
    """
    run_config = GrandnormConfig.from_file(config) if config else GrandnormConfig.default()
    set_logging_levels(LoggingLevels(log_level or run_config.logging.level, run_config.logging.numpy_errors))
    ctx.obj = {"service": ReportService(run_config), "out": None, "format": "json"}


@cli.group()
def norm() -> None:
    """Lebesgue, Morrey and grand norms of a single field."""


@norm.command()
@report_options
@SPACE
@EXPONENT
@FUNCTION
@click.pass_context
def lebesgue(ctx: click.Context, space: str, exponent: str, function: str) -> None:
    _emit(ctx, _service(ctx).lebesgue(space, exponent, function))


@norm.command()
@report_options
@SPACE
@EXPONENT
@LAMBDA
@FUNCTION
@click.pass_context
def morrey(ctx: click.Context, space: str, exponent: str, lambda_: str | None, function: str) -> None:
    _emit(ctx, _service(ctx).morrey(space, exponent, lambda_, function))


@norm.command()
@report_options
@grid_option
@SPACE
@EXPONENT
@LAMBDA
@FUNCTION
@THETA
@click.pass_context
def grand(ctx: click.Context, space: str, exponent: str, lambda_: str | None, function: str, theta: float) -> None:
    _emit(ctx, _service(ctx).grand(space, exponent, lambda_, function, theta))


@norm.command()
@report_options
@grid_option
@SPACE
@EXPONENT
@LAMBDA
@FUNCTION
@THETA
@click.pass_context
def equivalent(ctx: click.Context, space: str, exponent: str, lambda_: str | None, function: str, theta: float) -> None:
    _emit(ctx, _service(ctx).grand(space, exponent, lambda_, function, theta, equivalent=True))


@norm.command()
@report_options
@grid_option
@SPACE
@EXPONENT
@LAMBDA
@FUNCTION
@THETA
@click.option("--shift", type=float, default=None, help="Shift c of the left embedding (default: grid median).")
@click.pass_context
def chain(
    ctx: click.Context, space: str, exponent: str, lambda_: str | None, function: str, theta: float, shift: float | None
) -> None:
    _emit(ctx, _service(ctx).chain(space, exponent, lambda_, function, theta, shift))


@cli.group()
def diag() -> None:
    """Structural constants, exponent regularity and closure diagnostics."""


@diag.command("space")
@report_options
@SPACE
@click.option("--no-triangle", is_flag=True, help="Skip the O(n^3) quasi-triangle constant.")
@click.pass_context
def diag_space(ctx: click.Context, space: str, no_triangle: bool) -> None:
    _emit(ctx, _service(ctx).space(space, with_triangle=not no_triangle))


@diag.command("exponent")
@report_options
@grid_option
@SPACE
@EXPONENT
@click.option("--theta", type=float, default=None, help="Also report the uniform-in-c regularity of 1/(p - c).")
@click.pass_context
def diag_exponent(ctx: click.Context, space: str, exponent: str, theta: float | None) -> None:
    _emit(ctx, _service(ctx).exponent(space, exponent, theta))


@diag.command()
@report_options
@grid_option
@click.option("--family", required=True, help="Refinement family: dyadic, graded[:m], uniform, snowflake:alpha.")
@click.option("--levels", required=True, help="Levels as 6..12 or 500,1000.")
@click.option("--exponent", default="const:2", show_default=True)
@LAMBDA
@click.option("--witness", required=True, help="Field generator or file evaluated on every level.")
@THETA
@click.option("--no-regularity-check", is_flag=True, help="Skip the log-Hoelder and doubling checks of each level.")
@click.pass_context
def density(
    ctx: click.Context,
    family: str,
    levels: str,
    exponent: str,
    lambda_: str | None,
    witness: str,
    theta: float,
    no_regularity_check: bool,
) -> None:
    if no_regularity_check:
        _config(ctx).density.check_regularity = False
    _emit(ctx, _service(ctx).density(family, levels, exponent, lambda_, witness, theta))


@cli.group()
def predual() -> None:
    """Closed-range grand norms, blocks and predual bounds."""


@predual.command("scriptL")
@report_options
@SPACE
@EXPONENT
@FUNCTION
@THETA
@CAP
@KAPPA_GRID
@EXHAUSTION
@click.pass_context
def script_l(
    ctx: click.Context,
    space: str,
    exponent: str,
    function: str,
    theta: float,
    a: float,
    kgrid: str | None,
    exhaustion: int | None,
) -> None:
    _emit(ctx, _service(ctx).script_l(space, exponent, function, theta, a, kgrid, exhaustion))


@predual.command()
@report_options
@SPACE
@EXPONENT
@FUNCTION
@THETA
@CAP
@KAPPA_GRID
@EXHAUSTION
@click.pass_context
def hnorm(
    ctx: click.Context,
    space: str,
    exponent: str,
    function: str,
    theta: float,
    a: float,
    kgrid: str | None,
    exhaustion: int | None,
) -> None:
    _emit(ctx, _service(ctx).hnorm(space, exponent, function, theta, a, kgrid, exhaustion))


@predual.command()
@report_options
@SPACE
@EXPONENT
@FUNCTION
@THETA
@CAP
@KAPPA_GRID
@click.option("--block", required=True, help="Field normalized into a block and paired against --function.")
@click.option("--kappa", type=float, default=None, help="Block shift (default a).")
@click.pass_context
def pair(
    ctx: click.Context,
    space: str,
    exponent: str,
    function: str,
    theta: float,
    a: float,
    kgrid: str | None,
    block: str,
    kappa: float | None,
) -> None:
    _emit(ctx, _service(ctx).pair(space, exponent, function, block, theta, a, kappa, kgrid))


@predual.command()
@report_options
@SPACE
@EXPONENT
@THETA
@CAP
@KAPPA_GRID
@click.option("--block", required=True, help="Field normalized into a block at --kappa, then split.")
@click.option("--kappa", type=float, required=True)
@click.pass_context
def split(
    ctx: click.Context, space: str, exponent: str, theta: float, a: float, kgrid: str | None, block: str, kappa: float
) -> None:
    _emit(ctx, _service(ctx).split(space, exponent, block, theta, a, kappa, kgrid))


@cli.command()
@report_options
@click.argument("suites", nargs=-1)
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Seed of the randomized suites (default 42).")
@click.option("--instances", type=click.IntRange(min=1), default=None, help="Instances per suite (default 1000).")
@click.option("--list", "list_suites", is_flag=True, help="List the suites and what each one checks.")
@click.pass_context
def verify(
    ctx: click.Context, suites: tuple[str, ...], seed: int | None, instances: int | None, list_suites: bool
) -> int:
    """Run randomized invariant suites (all by default)."""
    if list_suites:
        _emit(ctx, {"suites": [{"name": s.name, "statement": s.statement, "anchor": s.anchor} for s in SUITES]})
        return EXIT_OK
    settings = _config(ctx).verify
    if seed is not None:
        settings.seed = seed
    if instances is not None:
        settings.instances = instances
    report = _service(ctx).verify(list(suites))
    _emit(ctx, report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED


def run(argv: Sequence[str] | None = None) -> int:
    """Run the command line and map outcomes to exit codes."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="grandnorm", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_INPUT_ERROR
    except (GrandnormError, ConfigError) as e:
        click.echo(f"grandnorm: error: {e}", err=True)
        return EXIT_INPUT_ERROR
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    init_logging(file_handler=False)
    sys.exit(run())
