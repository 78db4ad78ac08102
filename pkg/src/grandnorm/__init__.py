"""
Grand variable-exponent Lebesgue and Morrey norms on finite quasi-metric measure spaces.

The package follows a model / controller / utils split: immutable inputs live in
`grandnorm.model`, the computations in `grandnorm.controller`, text formats and logging
in `grandnorm.utils`. `grandnorm.service` and `grandnorm.cli` form the command line.
"""

from __future__ import annotations

__all__ = ["cli", "config", "service"]
