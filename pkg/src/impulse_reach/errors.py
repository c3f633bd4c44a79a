"""Exception types shared across the library.

All validation-style failures derive from ValueError so callers can catch
them uniformly; numeric solver failures are RuntimeErrors.
"""


class DomainError(ValueError):
    """An argument lies outside the set/domain it must belong to."""


class BoundaryError(ValueError):
    """A one-sided limit was requested on the unavailable side of the domain."""


class CapacityError(ValueError):
    """A representation limit was exceeded (polynomial degree, non-step density)."""


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold."""


class SchemaError(ValueError):
    """A scenario or measure file does not match the expected JSON schema."""


class NumericError(RuntimeError):
    """The LP solver failed (unbounded problem or iteration limit)."""


class EmptySetError(ValueError):
    """A set-distance was requested for an empty set."""
