"""
Exception hierarchy for grandnorm.

Every error raised for bad input derives from GrandnormError and from the builtin
it refines, so callers can catch either.
"""


class GrandnormError(Exception):
    """Root of all grandnorm errors."""


class InvalidSpaceError(GrandnormError, ValueError):
    """Raised when a quasi-metric measure space violates its structural invariants."""


class InvalidExponentError(GrandnormError, ValueError):
    """Raised when exponent values fall outside their admissible range."""


class InvalidFieldError(GrandnormError, ValueError):
    """Raised when function samples are non-finite or do not match the space."""


class ParameterRangeError(GrandnormError, ValueError):
    """Raised when a scalar parameter (radius, shift, threshold, kappa) is out of range."""


class ConvergenceError(GrandnormError, RuntimeError):
    """Raised when a bisection fails to reach tolerance within its iteration cap."""


class InputFormatError(GrandnormError, ValueError):
    """Raised for malformed input files or generator strings."""
