"""Exception types shared across the package."""


class TarchError(Exception):
    """Base class for package errors."""


class DomainError(TarchError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class MomentDivergentError(TarchError, ArithmeticError):
    """The requested moment of the innovation distribution is infinite."""


class QuadratureError(TarchError, ArithmeticError):
    """Adaptive quadrature could not reach the requested tolerance."""


class NumericalOverflowError(TarchError, OverflowError):
    """A trajectory exceeded the configured overflow cap."""


class SearchError(TarchError, RuntimeError):
    """A numerical search terminated without finding an admissible value."""


class TruncationWarning(UserWarning):
    """The max-over-m search attained its maximum at the truncation cap."""
