"""Exceptions raised by the cip4helm library.

Scripts translate these into exit codes, the numerical modules only raise.
"""
import numpy as np


class CipError(Exception):
    """Base class for every error raised by cip4helm"""


class ConfigError(CipError, ValueError):
    """Invalid problem description or run configuration"""


class UnsupportedRegimeError(CipError, ValueError):
    """Parameters outside the regime an analysis tool is defined for"""


class DispersionError(CipError, ArithmeticError):
    """The dispersion relation has no real roots"""


class SingularMatrixError(CipError, np.linalg.LinAlgError):
    """Zero pivot met during elimination"""

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class QuadratureError(CipError, ArithmeticError):
    """Composite quadrature did not settle before the panel cap"""


class OverflowRegimeError(CipError, OverflowError):
    """Unscaled fundamental-system coefficient is not representable in double precision"""
