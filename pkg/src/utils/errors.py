"""
Exception hierarchy shared by every package. The CLI maps these onto exit codes:
configuration and geometry problems exit with 2, numerical failures with 3.
"""


class RisIsingError(Exception):
    """Base class for all errors raised by this project."""


class ConfigurationError(RisIsingError, ValueError):
    """Invalid scene, scenario file, solver parameters or method/level combination."""


class DegenerateGeometryError(RisIsingError, ValueError):
    """Coincident points or an all-zero channel where a direction or norm is required."""


class NumericalError(RisIsingError, ArithmeticError):
    """Non-finite values, or a problem too large for the requested computation."""
