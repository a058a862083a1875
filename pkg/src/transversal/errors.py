"""Exception hierarchy shared by every module."""


class TransversalError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(TransversalError, ValueError):
    """An argument violates an operation's precondition."""


class ShapeError(InvalidArgumentError):
    """Color count does not match what the operation requires (e.g. m != n)."""


class InvalidWitnessError(InvalidArgumentError):
    """An absorber witness does not meet its own preconditions."""


class BudgetExceededError(TransversalError):
    """An exact computation was refused because it exceeds its budget."""


class InstanceFormatError(InvalidArgumentError):
    """A serialized instance or certificate could not be parsed."""


class InvariantViolation(TransversalError):
    """Internal consistency check failed (e.g. a solver produced an invalid certificate)."""
