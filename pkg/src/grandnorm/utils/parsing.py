"""
Text inputs: space, exponent and field files plus the symbolic generators accepted on the command line.

Files are split into `[section]` blocks; `#` starts a comment. A space file looks like

    [meta]
    n = 3, muX = 1.5, metric = snowflake:0.5
    [weights]
    0.5
    0.5
    0.5
    [coords]
    0.0
    0.5
    1.0

with `[dist]` (n rows of n entries) in place of `[coords]` for an explicit quasi-metric.
Reals go through float(), i.e. decimal rounded to nearest binary64.
"""

import math
import re
from pathlib import Path

import numpy as np

from grandnorm.model.errors import GrandnormError, InputFormatError
from grandnorm.model.exponent import Exponent, MorreyExponent
from grandnorm.model.field import Field
from grandnorm.model.params import ScriptLParams
from grandnorm.model.space import (
    DEFAULT_RADIUS_BUMP,
    QuasiMetricSpace,
    dyadic_interval,
    graded_interval,
    uniform_interval,
)

SECTION = re.compile(r"^\[(\w+)\]$")
GENERATOR = re.compile(r"^(\w+):(.*)$")
LEVEL_RANGE = re.compile(r"^(\d+)\.\.(\d+)$")


def _numbers(text: str, what: str) -> list[float]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise InputFormatError(f"malformed number in {what}: {text!r}") from e
    if not all(math.isfinite(v) for v in values):
        raise InputFormatError(f"non-finite number in {what}: {text!r}")
    return values


def _integer(text: str, what: str) -> int:
    try:
        return int(text.strip())
    except ValueError as e:
        raise InputFormatError(f"{what} must be an integer, got {text!r}") from e


def read_sections(path: str | Path) -> dict[str, list[str]]:
    file = Path(path).expanduser()
    if not file.is_file():
        raise InputFormatError(f"input file not found: {file}")
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for number, raw in enumerate(file.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = SECTION.match(line)
        if header:
            name = header.group(1).lower()
            if name in sections:
                raise InputFormatError(f"{file}:{number}: duplicate section [{name}]")
            current = sections[name] = []
        elif current is None:
            raise InputFormatError(f"{file}:{number}: content before the first section")
        else:
            current.append(line)
    return sections


def _meta(lines: list[str]) -> dict[str, str]:
    meta = {}
    for line in lines:
        for item in line.split(","):
            if not item.strip():
                continue
            key, sep, value = item.partition("=")
            if not sep:
                raise InputFormatError(f"[meta] entries must be key=value, got {item.strip()!r}")
            meta[key.strip().lower()] = value.strip()
    return meta


def _metric_alpha(metric: str) -> float:
    if metric in ("", "euclidean"):
        return 1.0
    match = GENERATOR.match(metric)
    if match and match.group(1) == "snowflake":
        return _numbers(match.group(2), "metric")[0]
    raise InputFormatError(f"unknown metric {metric!r}; expected euclidean or snowflake:alpha")


def _values_section(sections: dict[str, list[str]], name: str, n: int) -> np.ndarray:
    if name not in sections:
        raise InputFormatError(f"missing [{name}] section")
    values = _numbers(" ".join(sections[name]), f"[{name}]")
    if len(values) != n:
        raise InputFormatError(f"[{name}] has {len(values)} values, expected {n}")
    return np.asarray(values)


def load_space_file(path: str | Path, radius_bump: float = DEFAULT_RADIUS_BUMP) -> QuasiMetricSpace:
    sections = read_sections(path)
    meta = _meta(sections.get("meta", []))
    weights = np.asarray(_numbers(" ".join(sections.get("weights", [])), "[weights]"))
    n = _integer(meta["n"], "n") if "n" in meta else weights.size
    if weights.size != n:
        raise InputFormatError(f"[weights] has {weights.size} values, expected {n}")
    if "mux" in meta:
        declared = _numbers(meta["mux"], "muX")[0]
        if not math.isclose(declared, float(np.sum(weights)), rel_tol=1e-9):
            raise InputFormatError(f"muX = {declared} does not match the weight sum {np.sum(weights)}")
    label = meta.get("label", Path(path).stem)

    if ("dist" in sections) == ("coords" in sections):
        raise InputFormatError("a space file needs exactly one of [dist] or [coords]")
    if "dist" in sections:
        rows = [_numbers(line, "[dist]") for line in sections["dist"]]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise InputFormatError(f"[dist] must hold {n} rows of {n} entries")
        return QuasiMetricSpace(weight=weights, dist_matrix=np.asarray(rows), label=label, radius_bump=radius_bump)

    rows = [_numbers(line, "[coords]") for line in sections["coords"]]
    if len(rows) != n or len({len(row) for row in rows}) != 1:
        raise InputFormatError(f"[coords] must hold {n} rows of equal length")
    coords = np.asarray(rows)
    if coords.shape[1] == 1:
        coords = coords[:, 0]
    alpha = _metric_alpha(meta.get("metric", "euclidean"))
    return QuasiMetricSpace(weight=weights, coords=coords, alpha=alpha, label=label, radius_bump=radius_bump)


def parse_space(source: str, radius_bump: float = DEFAULT_RADIUS_BUMP) -> QuasiMetricSpace:
    """A generator (dyadic:L, graded:L[,m], uniform:n[,length], snowflake:L,alpha) or a space file."""
    match = GENERATOR.match(source)
    if match and match.group(1) in ("dyadic", "graded", "uniform", "snowflake"):
        kind, args = match.group(1), [a.strip() for a in match.group(2).split(",")]
        try:
            if kind == "dyadic" and len(args) == 1:
                return dyadic_interval(int(args[0]), radius_bump=radius_bump)
            if kind == "graded" and len(args) in (1, 2):
                return graded_interval(*(int(a) for a in args), radius_bump=radius_bump)
            if kind == "uniform" and len(args) in (1, 2):
                length = float(args[1]) if len(args) == 2 else 1.0
                return uniform_interval(int(args[0]), length, radius_bump=radius_bump)
            if kind == "snowflake" and len(args) == 2:
                return dyadic_interval(int(args[0]), float(args[1]), radius_bump=radius_bump)
        except ValueError as e:
            if isinstance(e, GrandnormError):
                raise
            raise InputFormatError(f"malformed space generator {source!r}") from e
        raise InputFormatError(f"wrong number of arguments in space generator {source!r}")
    return load_space_file(source, radius_bump)


def parse_family(family: str, levels: list[int], radius_bump: float = DEFAULT_RADIUS_BUMP) -> list[QuasiMetricSpace]:
    """Refinement family: dyadic, graded[:m], uniform or snowflake:alpha, one space per level."""
    kind, _, arg = family.partition(":")
    if kind == "dyadic":
        return [dyadic_interval(level, radius_bump=radius_bump) for level in levels]
    if kind == "graded":
        cells = _integer(arg, "cells per shell") if arg else 4
        return [graded_interval(level, cells, radius_bump=radius_bump) for level in levels]
    if kind == "uniform":
        return [uniform_interval(level, radius_bump=radius_bump) for level in levels]
    if kind == "snowflake" and arg:
        alpha = _numbers(arg, "snowflake exponent")[0]
        return [dyadic_interval(level, alpha, radius_bump=radius_bump) for level in levels]
    raise InputFormatError(f"unknown refinement family {family!r}")


def parse_levels(text: str) -> list[int]:
    """`6..12` or a comma list `500,1000`."""
    text = text.strip()
    match = LEVEL_RANGE.match(text)
    if match:
        low, high = int(match.group(1)), int(match.group(2))
        if high < low:
            raise InputFormatError(f"empty level range {text!r}")
        return list(range(low, high + 1))
    levels = [_integer(part, "level") for part in text.split(",") if part.strip()]
    if not levels:
        raise InputFormatError("no levels given")
    return sorted(set(levels))


def _positions(space: QuasiMetricSpace, source: str) -> np.ndarray:
    positions = space.positions
    if positions is None:
        raise InputFormatError(f"generator {source!r} needs point coordinates, the space only has distances")
    return positions


def _pointwise(source: str, space: QuasiMetricSpace, section: str) -> np.ndarray:
    match = GENERATOR.match(source)
    if match and match.group(1) in ("const", "affine", "jump"):
        kind, args = match.group(1), _numbers(match.group(2), source)
        if kind == "const" and len(args) == 1:
            return np.full(space.n, args[0])
        if kind == "affine" and len(args) == 2:
            return args[0] + args[1] * _positions(space, source)
        if kind == "jump" and len(args) == 3:
            return np.where(_positions(space, source) < args[0], args[1], args[2])
        raise InputFormatError(f"wrong number of arguments in generator {source!r}")
    return _values_section(read_sections(source), section, space.n)


def parse_exponent(source: str, space: QuasiMetricSpace) -> Exponent:
    """const:v, affine:a,b (a + b x), jump:x0,v1,v2, or a file with an [exponent] section."""
    return Exponent(_pointwise(source, space, "exponent"))


def parse_lambda(source: str | None, space: QuasiMetricSpace) -> MorreyExponent:
    if source is None:
        return MorreyExponent.constant(space.n)
    return MorreyExponent(_pointwise(source, space, "lambda"))


def parse_field(source: str, space: QuasiMetricSpace) -> Field:
    """power:alpha (x^-alpha), const:v, or a file with a [function] section."""
    match = GENERATOR.match(source)
    if match and match.group(1) in ("power", "const"):
        kind, args = match.group(1), _numbers(match.group(2), source)
        if len(args) != 1:
            raise InputFormatError(f"generator {source!r} takes one argument")
        if kind == "const":
            return Field(np.full(space.n, args[0]))
        x = np.abs(_positions(space, source))
        positive = x[x > 0]
        if positive.size == 0:
            raise InputFormatError("power generator needs a point away from 0")
        # a point at 0 takes the value of the nearest midpoint
        x = np.where(x > 0, x, np.min(positive))
        return Field(x ** -args[0])
    return Field(_values_section(read_sections(source), "function", space.n))


def parse_kappa_grid(text: str, theta: float, a: float) -> ScriptLParams:
    """dyadic:L or an explicit increasing comma list (a is appended when missing)."""
    match = GENERATOR.match(text.strip())
    if match and match.group(1) == "dyadic":
        return ScriptLParams.dyadic(theta, a, _integer(match.group(2), "dyadic levels"))
    values = sorted(_numbers(text, "kappa grid"))
    if not values or values[-1] != a:
        values.append(a)
    return ScriptLParams(theta=theta, a=a, kappa_grid=tuple(values))
