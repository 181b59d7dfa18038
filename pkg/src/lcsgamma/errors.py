"""Exception types shared across the package."""


class LcsGammaError(Exception):
    """Base class for all package errors."""


class ValidationError(LcsGammaError, ValueError):
    """Arguments violate an operation's preconditions."""


class ResourceError(LcsGammaError):
    """A computation would exceed a configured memory or compute budget."""

    def __init__(self, message, required=None, allowed=None):
        super().__init__(message)
        self.required = required
        self.allowed = allowed
