import importlib.metadata
from functools import cache
from pathlib import Path

import toml

PACKAGE = "grandnorm"
PYPROJECT = Path(__file__).resolve().parents[3] / "pyproject.toml"


@cache
def get_version() -> str:
    """Installed distribution version, or the one in pyproject.toml when running from a checkout."""
    try:
        return importlib.metadata.version(PACKAGE)
    except importlib.metadata.PackageNotFoundError as missing:
        if not PYPROJECT.exists():
            raise FileNotFoundError(f"{PACKAGE} is not installed and {PYPROJECT} does not exist") from missing
        return toml.load(PYPROJECT)["tool"]["poetry"]["version"]
