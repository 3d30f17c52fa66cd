"""Exception types shared by the library and the command line."""


class SparseTotientError(Exception):
    """Base class for library errors."""


class LimitError(SparseTotientError):
    """A query needs data beyond the sieve limit; rebuild with a larger one."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class ResourceError(SparseTotientError):
    """A request is too large to represent or allocate."""


class UnsupportedInputError(SparseTotientError, ValueError):
    """Input outside the supported domain, e.g. factoring beyond 64 bits."""


class PreconditionError(SparseTotientError, ValueError):
    """Arguments violate an operation's precondition."""
