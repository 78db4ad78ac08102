# tests/controller/conftest.py
import numpy as np
import pytest

from grandnorm.model.exponent import Exponent
from grandnorm.model.field import Field
from grandnorm.model.space import QuasiMetricSpace


@pytest.fixture
def two_point() -> tuple[QuasiMetricSpace, Exponent, Field]:
    """Weights (1/2, 1/2), p = (2, 3), f = (2, 1): modular 2.5, norm solves l^3 - 2l - 1/2 = 0."""
    space = QuasiMetricSpace(weight=[0.5, 0.5], dist_matrix=[[0.0, 1.0], [1.0, 0.0]], label="two-point")
    return space, Exponent([2.0, 3.0]), Field.of([2.0, 1.0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)
