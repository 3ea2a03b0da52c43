"""Exception types shared across the package.

Errors that come from bad inputs derive from :class:`ValidationError` (mapped
to exit status 1 by the CLI); errors raised by a numerical procedure that
could not deliver a trustworthy answer derive from :class:`NumericalError`
(exit status 2).
"""


class RelScatterError(Exception):
    """Base class for all package errors."""


class ValidationError(RelScatterError, ValueError):
    """An input violates a documented precondition."""


class NumericalError(RelScatterError, ArithmeticError):
    """A numerical procedure failed to produce a reliable result."""


class DomainError(ValidationError):
    pass


class BranchCut(ValidationError):
    """Argument lies on the cut of the principal logarithm."""


class SingularPoint(ValidationError):
    """Kernel requested at zero displacement."""


class BadResolution(ValidationError):
    pass


class InsufficientBank(ValidationError):
    """The k-space field bank is coarser than the configured minimum."""


class NonConvergent(NumericalError):
    """A series did not meet its tail tolerance within the term budget."""


class NearSingular(NumericalError):
    """The discretized Lippmann-Schwinger system is numerically singular."""
