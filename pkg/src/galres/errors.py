"""Exception taxonomy shared by every module.

Validation-type failures (bad arguments, empty ranges, capacity limits)
map to CLI exit code 2, accuracy-type failures (unreachable tolerance,
non-convergence) to exit code 3.
"""

from __future__ import annotations


class GalresError(Exception):
    """Base class for all package errors."""


class ValidationError(GalresError):
    """A precondition on the inputs is violated.

    ``violated`` names the condition so callers can report it verbatim.
    """

    def __init__(self, message: str, violated: str | None = None):
        super().__init__(message)
        self.violated = violated if violated is not None else message


class CapacityError(ValidationError):
    """The request is valid but exceeds a documented size limit."""


class UnsupportedAlgorithmError(ValidationError):
    """The requested algorithm does not apply to these arguments."""


class EmptyRangeError(ValidationError):
    """A range argument contains no admissible points."""


class AccuracyError(GalresError):
    """The requested tolerance cannot be certified."""

    def __init__(self, message: str, achieved: float | None = None,
                 requested: float | None = None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class ConvergenceError(AccuracyError):
    """An iteration hit its cap; carries the last iterate for inspection."""

    def __init__(self, message: str, last_iterate=None, residual: float | None = None):
        super().__init__(message, achieved=residual)
        self.last_iterate = last_iterate
        self.residual = residual
