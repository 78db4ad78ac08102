import shutil
import tempfile
from collections.abc import Iterator
from pathlib import Path

import pytest

import grandnorm
from grandnorm.utils.logging import init_logging

INPUTS_DIR = Path(grandnorm.__file__).parent / "assets" / "inputs"


def pytest_sessionstart(session):
    """Console logging only; tests never write under ~/.grandnorm."""
    init_logging(file_handler=False)


@pytest.fixture
def temp_dir() -> Iterator[str]:
    temp_path = tempfile.mkdtemp(prefix="grandnorm_")
    yield temp_path
    shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture
def inputs_dir() -> Path:
    """Sample space, exponent, lambda and function files shipped with the package."""
    return INPUTS_DIR
