import os

import numpy as np
import pytest

from grandnorm.model.errors import InputFormatError, InvalidExponentError, InvalidSpaceError
from grandnorm.model.space import QuasiMetricSpace, uniform_interval
from grandnorm.utils.parsing import (
    load_space_file,
    parse_exponent,
    parse_family,
    parse_field,
    parse_kappa_grid,
    parse_lambda,
    parse_levels,
    parse_space,
    read_sections,
)


def write(temp_dir: str, name: str, text: str) -> str:
    path = os.path.join(temp_dir, name)
    with open(path, "w", encoding="utf-8") as file:
        file.write(text)
    return path


def test_load_two_point_space(inputs_dir):
    space = load_space_file(inputs_dir / "two_point.space")
    assert space.label == "two-point"
    assert space.n == 2
    np.testing.assert_array_equal(space.dist, [[0.0, 1.0], [1.0, 0.0]])
    assert space.positions is None


def test_load_snowflake_space(inputs_dir):
    space = parse_space(str(inputs_dir / "three_point.space"))
    assert space.label == "three-point"
    assert space.alpha == 0.5
    assert space.total_measure == pytest.approx(1.5)
    assert space.distances_from(0)[1] == pytest.approx(0.5)


def test_label_defaults_to_file_stem(temp_dir):
    path = write(temp_dir, "pair.space", "[weights]\n1 1\n[coords]\n0\n1\n")
    assert load_space_file(path).label == "pair"


@pytest.mark.parametrize(
    "text, message",
    [
        ("[weights]\n1\n[weights]\n1\n[coords]\n0\n", "duplicate section"),
        ("1\n[weights]\n1\n[coords]\n0\n", "before the first section"),
        ("[meta]\nmuX = 2\n[weights]\n0.5 0.5\n[coords]\n0\n1\n", "does not match"),
        ("[weights]\n1 1\n[coords]\n0\n1\n[dist]\n0 1\n1 0\n", "exactly one"),
        ("[weights]\n1 x\n[coords]\n0\n1\n", "malformed number"),
        ("[meta]\nn = 3\n[weights]\n1 1\n[coords]\n0\n1\n", "expected 3"),
        ("[weights]\n1 1\n[dist]\n0 1\n", "rows"),
        ("[meta]\nmetric = taxicab\n[weights]\n1 1\n[coords]\n0\n1\n", "unknown metric"),
    ],
)
def test_malformed_space_files(temp_dir, text, message):
    path = write(temp_dir, "bad.space", text)
    with pytest.raises(InputFormatError, match=message):
        load_space_file(path)


def test_comments_are_ignored(temp_dir):
    path = write(temp_dir, "c.space", "# header\n[weights] # masses\n1 1\n[coords]\n0 # left\n1\n")
    assert read_sections(path) == {"weights": ["1 1"], "coords": ["0", "1"]}


def test_missing_file():
    with pytest.raises(InputFormatError, match="not found"):
        parse_space("no_such.space")


@pytest.mark.parametrize(
    "source, n",
    [("dyadic:3", 8), ("graded:3,2", 7), ("graded:2", 9), ("uniform:5", 5), ("snowflake:2,0.5", 4)],
)
def test_space_generators(source, n):
    assert parse_space(source).n == n


def test_uniform_generator_length():
    assert parse_space("uniform:5,2").total_measure == pytest.approx(2.0)


def test_bad_space_generators():
    with pytest.raises(InputFormatError, match="malformed"):
        parse_space("dyadic:x")
    with pytest.raises(InputFormatError, match="number of arguments"):
        parse_space("dyadic:1,2")
    with pytest.raises(InvalidSpaceError):
        parse_space("graded:0")


def test_parse_family():
    assert [space.n for space in parse_family("graded:2", [3, 4])] == [7, 9]
    assert [space.n for space in parse_family("dyadic", [2, 3])] == [4, 8]
    assert parse_family("snowflake:0.5", [2])[0].alpha == 0.5
    with pytest.raises(InputFormatError, match="family"):
        parse_family("fractal", [2])


def test_parse_levels():
    assert parse_levels("6..8") == [6, 7, 8]
    assert parse_levels("1000, 500,500") == [500, 1000]
    with pytest.raises(InputFormatError, match="empty level range"):
        parse_levels("8..6")
    with pytest.raises(InputFormatError, match="no levels"):
        parse_levels(" , ")


def test_exponent_generators(inputs_dir):
    space = uniform_interval(4)
    np.testing.assert_array_equal(parse_exponent("const:2.5", space).values, [2.5] * 4)
    np.testing.assert_allclose(parse_exponent("affine:2,1", space).values, 2.0 + space.coords)
    np.testing.assert_array_equal(parse_exponent("jump:0.5,2,3", space).values, [2.0, 2.0, 3.0, 3.0])
    two_point = load_space_file(inputs_dir / "two_point.space")
    np.testing.assert_array_equal(parse_exponent(str(inputs_dir / "two_point.exponent"), two_point).values, [2, 3])


def test_exponent_generator_errors(inputs_dir):
    two_point = load_space_file(inputs_dir / "two_point.space")
    with pytest.raises(InputFormatError, match="coordinates"):
        parse_exponent("affine:2,1", two_point)
    with pytest.raises(InputFormatError, match="number of arguments"):
        parse_exponent("const:1,2", two_point)
    with pytest.raises(InvalidExponentError):
        parse_exponent("const:1", two_point)
    with pytest.raises(InputFormatError, match=r"missing \[exponent\]"):
        parse_exponent(str(inputs_dir / "three_point.lambda"), two_point)


def test_parse_lambda(inputs_dir):
    three_point = parse_space(str(inputs_dir / "three_point.space"))
    assert parse_lambda(None, three_point).is_zero
    np.testing.assert_array_equal(
        parse_lambda(str(inputs_dir / "three_point.lambda"), three_point).values, [0.25, 0.5, 0.25]
    )


def test_parse_field(inputs_dir):
    space = uniform_interval(4)
    np.testing.assert_allclose(parse_field("power:0.5", space).values, space.coords**-0.5)
    np.testing.assert_array_equal(parse_field("const:3", space).values, [3.0] * 4)
    two_point = load_space_file(inputs_dir / "two_point.space")
    np.testing.assert_array_equal(parse_field(str(inputs_dir / "two_point.function"), two_point).values, [2, 1])


def test_power_field_at_origin():
    space = QuasiMetricSpace(weight=[1.0, 1.0, 1.0], coords=[0.0, 1.0, 4.0])
    np.testing.assert_allclose(parse_field("power:0.5", space).values, [1.0, 1.0, 0.5])
    with pytest.raises(InputFormatError, match="one argument"):
        parse_field("power:1,2", space)


def test_parse_kappa_grid():
    assert parse_kappa_grid("dyadic:2", 1.0, 0.5).kappa_grid == (0.125, 0.25, 0.5)
    assert parse_kappa_grid("0.3, 0.1", 1.0, 0.5).kappa_grid == (0.1, 0.3, 0.5)
    assert parse_kappa_grid("0.1,0.5", -1.0, 0.5).kappa_grid == (0.1, 0.5)
