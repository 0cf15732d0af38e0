"""Exception hierarchy shared by every dynmatch module."""


class DynMatchError(Exception):
    """Base class for all library errors."""


class OutOfUniverseError(DynMatchError, ValueError):
    pass


class DuplicateIdError(DynMatchError, KeyError):
    pass


class UnknownIdError(DynMatchError, KeyError):
    pass


class ColorMismatchError(DynMatchError, ValueError):
    pass


class SizeMismatchError(DynMatchError, ValueError):
    pass


class BalanceError(DynMatchError, ValueError):
    pass


class AssignmentValidationError(DynMatchError, ValueError):
    pass


class InstanceTooLargeError(DynMatchError, ValueError):
    pass


class InvariantError(DynMatchError, AssertionError):
    """An internal structural invariant was violated (signals a bug)."""


class IntegrityError(InvariantError):
    """The maintained matching is not perfect (e.g. root excess is non-empty)."""


class NegativeCycleError(InvariantError):
    """A residual graph that should be optimal exposed a negative cycle."""


class InfeasibleError(DynMatchError, RuntimeError):
    pass


class EmptyInstanceError(DynMatchError, ValueError):
    pass
