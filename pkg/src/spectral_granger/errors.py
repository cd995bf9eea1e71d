"""Exception hierarchy.

Errors split into two families so the command line front end can map them
onto exit codes: :class:`InputError` (bad data or configuration, exit 2) and
:class:`NumericalError` (the mathematics refused, exit 3).
"""


class SpectralGrangerError(Exception):
    """Base class for all package errors."""


class InputError(SpectralGrangerError, ValueError):
    """Invalid data, configuration or arguments."""


class NumericalError(SpectralGrangerError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy result."""


class GridTooCoarseError(InputError):
    pass


class InsufficientDataError(InputError):
    pass


class InvalidConfigError(InputError):
    pass


class DimensionMismatchError(InputError):
    pass


class InsufficientCoefficientsError(InputError):
    pass


class StabilityError(InputError):
    """VAR model whose companion matrix has spectral radius >= 1."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class NotFactorizableError(NumericalError):
    """Spectral density fails the Paley-Wiener (log-integrability) condition."""


class NonConvergenceError(NumericalError):
    """Factorization iteration stopped before reaching its tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
