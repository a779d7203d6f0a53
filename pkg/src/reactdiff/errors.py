"""Exception taxonomy shared by the library and the command-line front end."""


class ReactDiffError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(ReactDiffError):
    """Caller misuse: bad flag values, non-scalar loss, alpha=0, ..."""

    exit_code = 2


class ConfigError(ReactDiffError):
    """Inconsistent configuration (N not divisible by ws, empty dataset, ...)."""

    exit_code = 2


class ShapeError(ReactDiffError):
    """Tensor operands with incompatible shapes."""

    exit_code = 2


class FormatError(ReactDiffError):
    """Malformed on-disk artifact. Carries the byte offset where parsing failed."""

    exit_code = 3

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DataError(ReactDiffError):
    """Well-formed files that do not fit together (frame-count mismatch, ...)."""

    exit_code = 3


class CompatibilityError(ReactDiffError):
    """Checkpoint/config field disagreement; message names the offending field."""

    exit_code = 3


class DependencyError(ReactDiffError):
    """A required earlier pipeline artifact is missing (e.g. stage-1 checkpoint)."""

    exit_code = 4


class NumericError(ReactDiffError):
    """Non-finite values or a failed numerical routine."""

    exit_code = 5
