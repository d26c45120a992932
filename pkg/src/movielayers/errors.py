"""Exception types shared across the package.

Each maps to a distinct CLI exit code (see cli.EXIT_CODES).
"""


class MovielayersError(Exception):
    """Base class for all package errors."""


class ConfigurationError(MovielayersError):
    """A required configuration input (e.g. stopword file) is missing or invalid."""


class ScriptParseError(MovielayersError):
    """The screenplay text could not be chunked into scenes."""


class SrtParseError(MovielayersError):
    """A subtitle file is malformed; carries block index and line number when known."""

    def __init__(self, message, block_index=None, line_number=None):
        super().__init__(message)
        self.block_index = block_index
        self.line_number = line_number


class ValidationError(MovielayersError):
    """An input record violates its schema (e.g. confidence outside [0, 1])."""


class AlignmentError(MovielayersError):
    """Script/subtitle alignment failed (no scene matched any block)."""


class BuildError(MovielayersError):
    """Graph construction received inconsistent inputs."""


class ConvergenceError(MovielayersError):
    """An iterative solver did not converge; carries the last residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ImportFormatError(MovielayersError):
    """An external graph file does not match any supported import schema."""
