import numpy as np
import pytest

from grandnorm.controller.lebesgue import (
    embedding_constant,
    holder_constant,
    luxemburg_norm,
    luxemburg_norms,
    modular,
    pairing,
    restricted_norms,
)
from grandnorm.controller.measure_space import ball_table
from grandnorm.model.errors import ConvergenceError, InvalidFieldError, ParameterRangeError
from grandnorm.model.exponent import Exponent
from grandnorm.model.field import Field
from grandnorm.model.space import graded_interval, restrict, uniform_interval


def test_two_point_modular(two_point):
    space, p, f = two_point
    assert modular(space, p, f) == pytest.approx(2.5)


def test_two_point_norm_matches_cubic_root(two_point):
    space, p, f = two_point
    roots = np.roots([1.0, 0.0, -2.0, -0.5])
    expected = max(r.real for r in roots if abs(r.imag) < 1e-12)
    assert luxemburg_norm(space, p, f) == pytest.approx(expected, rel=1e-10)


def test_two_point_norm_matches_scan(two_point):
    space, p, f = two_point
    grid = np.arange(1.4, 1.7, 1e-6)
    values = 2.0 / grid**2 + 0.5 / grid**3
    crossing = grid[np.argmax(values <= 1.0)]
    assert luxemburg_norm(space, p, f) == pytest.approx(crossing, abs=2e-6)


def test_constant_exponent_closed_form(rng):
    space = uniform_interval(16, length=3.0)
    f = Field(rng.normal(size=16))
    p = Exponent.constant(16, 2.7)
    expected = np.sum(space.weight * np.abs(f.values) ** 2.7) ** (1 / 2.7)
    assert luxemburg_norm(space, p, f) == pytest.approx(expected, rel=1e-10)


def test_zero_field(two_point):
    space, p, _ = two_point
    assert modular(space, p, Field.zeros(2)) == 0.0
    assert luxemburg_norm(space, p, Field.zeros(2)) == 0.0


def test_unit_modular_at_the_norm(rng):
    space = uniform_interval(12)
    p = Exponent(rng.uniform(1.3, 5.0, 12))
    f = Field(rng.normal(size=12) * 1e3)
    norm = luxemburg_norm(space, p, f)
    assert modular(space, p, f.scaled(1.0 / norm)) == pytest.approx(1.0, abs=1e-10)


def test_norm_properties(rng):
    space = uniform_interval(10)
    p = Exponent(rng.uniform(1.5, 4.0, 10))
    f, g = Field(rng.normal(size=10)), Field(rng.normal(size=10))
    assert luxemburg_norm(space, p, f.scaled(-3.0)) == pytest.approx(3.0 * luxemburg_norm(space, p, f), rel=1e-10)
    assert luxemburg_norm(space, p, f + g) <= (luxemburg_norm(space, p, f) + luxemburg_norm(space, p, g)) * (1 + 1e-10)


def test_extreme_weights_stay_finite():
    space = graded_interval(1000, cells_per_shell=1)
    f = Field(space.coords**-0.5)
    norm = luxemburg_norm(space, Exponent.constant(space.n, 2.0), f)
    assert np.isfinite(norm)
    assert norm > 0


def test_bisection_failure_is_reported(two_point, mocker):
    space, p, f = two_point
    mocker.patch("grandnorm.controller.lebesgue.bisect", side_effect=RuntimeError("did not converge"))
    with pytest.raises(ConvergenceError, match="bisection"):
        luxemburg_norm(space, p, f)


def test_bad_tolerance_and_shapes(two_point):
    space, p, f = two_point
    with pytest.raises(ParameterRangeError, match="tolerance"):
        luxemburg_norm(space, p, f, tol=0.0)
    with pytest.raises(InvalidFieldError):
        luxemburg_norm(space, p, Field.of([1.0, 2.0, 3.0]))
    with pytest.raises(InvalidFieldError):
        luxemburg_norm(space, Exponent([2.0, 2.0, 2.0]), f)


def test_restricted_norms_match_restricted_spaces(rng):
    space = uniform_interval(6)
    p = Exponent(rng.uniform(1.5, 3.0, 6))
    f = Field(rng.normal(size=6))
    table = ball_table(space)
    rows = table.orders[table.centers]
    norms = restricted_norms(space, p, f, rows, table.sizes)
    for row, size, norm in zip(rows, table.sizes, norms):
        idx = np.sort(row[:size])
        sub = restrict(space, idx)
        expected = luxemburg_norm(sub, Exponent(p.values[idx]), Field(f.values[idx]))
        assert norm == pytest.approx(expected, rel=1e-9, abs=1e-300)


def test_restricted_norms_gather_rows_by_center(rng):
    space = graded_interval(5, 2)
    p = Exponent(rng.uniform(1.5, 3.0, space.n))
    f = Field(rng.normal(size=space.n))
    table = ball_table(space)
    gathered = restricted_norms(space, p, f, table.orders[table.centers], table.sizes)
    by_center = restricted_norms(space, p, f, table.orders, table.sizes, rows=table.centers, chunk=7)
    np.testing.assert_allclose(by_center, gathered, rtol=1e-12)


def test_constant_exponent_prefix_sums_match_bisection(rng):
    space = uniform_interval(9)
    p = Exponent.constant(9, 2.5)
    f = Field(np.where(rng.random(9) < 0.3, 0.0, rng.normal(size=9)))
    table = ball_table(space)
    norms = restricted_norms(space, p, f, table.orders, table.sizes, rows=table.centers)
    for center, size, norm in zip(table.centers, table.sizes, norms):
        idx = np.sort(table.orders[center][:size])
        expected = luxemburg_norm(restrict(space, idx), Exponent(p.values[idx]), Field(f.values[idx]))
        assert norm == pytest.approx(expected, rel=1e-9, abs=1e-300)


def test_luxemburg_norms_match_one_at_a_time(rng):
    space = graded_interval(4, 3)
    n = space.n
    exponents = rng.uniform(1.2, 4.0, (5, n))
    fields = rng.normal(size=(5, n))
    fields[2] = 0.0
    fields[3, ::2] = 0.0
    norms = luxemburg_norms(space, exponents, fields)
    assert norms[2] == 0.0
    for k in range(5):
        expected = luxemburg_norm(space, Exponent(exponents[k]), Field(fields[k]))
        assert norms[k] == pytest.approx(expected, rel=1e-9)
    shared = luxemburg_norms(space, exponents, fields[0], chunk=n)
    for k in range(5):
        assert shared[k] == pytest.approx(luxemburg_norm(space, Exponent(exponents[k]), Field(fields[0])), rel=1e-9)


def test_luxemburg_norms_rejects_bad_input(two_point):
    space, p, f = two_point
    with pytest.raises(ParameterRangeError, match="tolerance"):
        luxemburg_norms(space, p.values, f.values, tol=0.0)
    with pytest.raises(InvalidFieldError, match="samples"):
        luxemburg_norms(space, np.full(3, 2.0), np.ones(3))
    with pytest.raises(ParameterRangeError, match="at least 1"):
        luxemburg_norms(space, np.array([0.5, 2.0]), f.values)
    with pytest.raises(ParameterRangeError, match="finite"):
        luxemburg_norms(space, np.array([np.inf, 2.0]), f.values)


def test_pairing_and_constants():
    space = uniform_interval(2)
    assert pairing(space, Field.of([1.0, 2.0]), Field.of([3.0, -1.0])) == pytest.approx(0.5)
    assert holder_constant(Exponent([2.0, 4.0])) == pytest.approx(1.25)
    assert embedding_constant(uniform_interval(4, length=2.0)) == pytest.approx(3.0)
