"""Exception hierarchy.

Every numeric failure derives from :class:`NumericError` so the command line
can map it to a single exit code.
"""


class FracMixError(Exception):
    """Base class for all package errors."""


class NumericError(FracMixError):
    """A computation could not produce a trustworthy number."""


class NonConvergence(NumericError):
    pass


class RootNotFound(NumericError):
    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = dict(context or {})


class DomainError(NumericError, ValueError):
    pass


class InvalidParams(NumericError, ValueError):
    pass


class ToleranceNotMet(NumericError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class MaxIterExceeded(NumericError):
    def __init__(self, message, last_iterate=None, step_norms=()):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.step_norms = list(step_norms)


class OrderViolation(NumericError, ValueError):
    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = list(witnesses)


class OracleFailure(NumericError):
    pass


class SingularPartUnresolved(OracleFailure):
    pass


class GridMismatch(OracleFailure, ValueError):
    pass
