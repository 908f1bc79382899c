"""
Error types shared by every module.

Parameter problems derive from ValueError, numerical failures from
RuntimeError, so callers that only know the builtins still catch them.
"""


class MatryoshkaError(Exception):
    """Base class for all errors raised by this package"""

    exit_code = 1


class ParameterError(MatryoshkaError, ValueError):
    """An input lies outside the domain an operation accepts"""

    exit_code = 2


class SizeCapError(ParameterError):
    """A requested basis or dense matrix exceeds the configured cap"""


class BasisMismatchError(ParameterError):
    """Operators, states or bases that must agree do not"""


class NumericalError(MatryoshkaError, RuntimeError):
    """A numerical procedure failed to produce a trustworthy result"""

    exit_code = 3


class ConvergenceError(NumericalError):
    """Iterative solver did not converge or the residual is too large"""


class DegeneracyError(NumericalError):
    """Ground space is more degenerate than the caller can handle"""


class VanishingGapError(NumericalError):
    """No spectral gap separates the ground space from excited states"""


class VerificationError(NumericalError):
    """An analytic prediction disagrees with the numerical reference"""

    def __init__(self, message: str, residual: float = float('nan')):
        super().__init__(message)
        self.residual = residual
