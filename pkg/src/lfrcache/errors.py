"""Exception hierarchy shared by every module of the package."""


class LfrError(Exception):
    """Base class for all errors raised by lfrcache."""


class ShapeError(LfrError, ValueError):
    """Matrix or vector dimensions do not line up."""


class FieldMismatchError(LfrError, ValueError):
    """Operands live in different prime fields."""


class SingularMatrixError(LfrError, ArithmeticError):
    """A square matrix that had to be inverted is not full rank."""


class DomainError(LfrError, ValueError):
    """A parameter lies outside the domain of a formula."""


class ConfigurationError(LfrError, ValueError):
    """A system configuration is invalid or infeasible for the requested scheme."""


class DecodeFailureError(LfrError):
    """A user could not reconstruct its demand from cache and transcript."""


class CapacityError(LfrError):
    """An exhaustive search would exceed the configured size limit."""
