"""Exception hierarchy.

Input problems are ``ValueError`` subclasses and numerical failures are
``RuntimeError`` subclasses, so callers that only know the builtin types still
catch them.
"""

from typing import Optional


class TelemetryFormatError(ValueError):
    """Malformed telemetry CSV content at a known position."""

    def __init__(self, message: str, row: int, column: Optional[int] = None) -> None:
        """Initialize the error.

        Args:
            message: Description of the problem
            row: 1-based file row (the header is row 1)
            column: 1-based column, when the problem is a single cell
        """
        location = f"row {row}" if column is None else f"row {row}, column {column}"
        super().__init__(f"{message} ({location})")
        self.row = row
        self.column = column


class UnknownChannelError(ValueError):
    """A channel name that the telemetry does not contain."""

    def __init__(self, channel: str, available: Optional[list[str]] = None) -> None:
        message = f"unknown channel {channel}"
        if available:
            message += f"; available: {', '.join(available)}"
        super().__init__(message)
        self.channel = channel


class ModelFileError(ValueError):
    """Persisted model document that cannot be read or fails schema validation."""


class ModalDecompositionError(RuntimeError):
    """The eigensolver did not converge or produced non-finite output."""


class PerronViolationError(RuntimeError):
    """Leading eigenvalue is not a real unit eigenvalue."""

    def __init__(self, eigenvalue: complex) -> None:
        super().__init__(
            f"leading eigenvalue {eigenvalue:.12g} violates the Perron property "
            "(expected real, positive and equal to 1 within 1e-8)"
        )
        self.eigenvalue = eigenvalue


class PipelineStageError(RuntimeError):
    """Failure of one pipeline stage, wrapping the original cause."""

    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
