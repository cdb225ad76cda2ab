"""Exception types shared across the package."""


class FieldMismatchError(ValueError):
    """Operands live in different cyclotomic fields; lift one of them first."""


class NotAutomorphismError(ValueError):
    pass


class GroupTooLargeError(ValueError):
    pass


class SpecError(ValueError):
    """Malformed problem description (CLI input)."""


class InternalConsistencyError(RuntimeError):
    """Two independent computations that must agree did not.

    Raised when a structural theorem the library relies on is contradicted by
    an explicit computation; this indicates a bug or an invalid input group.
    """
