"""Exception hierarchy shared by every stage.

Each error carries the process exit code the CLI reports for it.
"""

from __future__ import annotations


class FpdError(Exception):
    """Base class for all fpdtrack errors."""

    exit_code: int = 1


class ConfigError(FpdError):
    """Invalid configuration, policy, or missing referenced file."""

    exit_code = 2


class InputFormatError(FpdError):
    """An input artifact could not be decoded or violates its format."""

    exit_code = 3


class FrameFormatError(InputFormatError):
    """Frame directory or pixel data problem."""


class TrackFormatError(InputFormatError):
    """Track file header, shape or content problem."""


class InvariantError(FpdError):
    """An internal invariant was violated."""

    exit_code = 4


class StageError(FpdError):
    """Failure inside a named pipeline stage.

    Wraps the original exception and inherits its exit code, so a missing
    source file still exits with the config-error code.
    """

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        self.exit_code = cause.exit_code if isinstance(cause, FpdError) else InvariantError.exit_code
        super().__init__(f"[{stage}] {cause}")
