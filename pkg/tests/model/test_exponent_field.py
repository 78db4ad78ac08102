import numpy as np
import pytest

from grandnorm.model.errors import InvalidExponentError, InvalidFieldError
from grandnorm.model.exponent import Exponent, MorreyExponent
from grandnorm.model.field import Field


def test_exponent_bounds():
    p = Exponent([2.0, 3.5, 2.5])
    assert p.n == 3
    assert p.minus == 2.0
    assert p.plus == 3.5
    assert not p.is_constant
    assert Exponent.constant(4, 2.5).is_constant


def test_exponent_must_exceed_one():
    with pytest.raises(InvalidExponentError, match="exceed 1"):
        Exponent([1.0, 2.0])


def test_exponent_must_be_finite():
    with pytest.raises(InvalidExponentError, match="finite"):
        Exponent([2.0, np.inf])


def test_morrey_exponent_range():
    assert MorreyExponent.constant(3).is_zero
    assert not MorreyExponent([0.0, 0.5]).is_zero
    with pytest.raises(InvalidExponentError, match=r"\[0, 1\]"):
        MorreyExponent([0.5, 1.2])
    with pytest.raises(InvalidExponentError, match=r"\[0, 1\]"):
        MorreyExponent([-0.1])


def test_field_rejects_non_finite_and_empty():
    with pytest.raises(InvalidFieldError, match="finite"):
        Field([1.0, np.nan])
    with pytest.raises(InvalidFieldError, match="nonempty"):
        Field([])


def test_field_helpers():
    f = Field.of([1.0, -3.0])
    assert f.n == 2
    assert f.sup == 3.0
    assert not f.is_zero
    assert Field.zeros(3).is_zero
    np.testing.assert_array_equal(f.scaled(2.0).values, [2.0, -6.0])
    np.testing.assert_array_equal((f + Field.of([1.0, 1.0])).values, [2.0, -2.0])


def test_field_copies_input():
    raw = np.array([1.0, 2.0])
    f = Field(raw)
    raw[0] = 5.0
    assert f.values[0] == 1.0
    assert not f.values.flags.writeable
