"""Utility modules."""

from src.utils.errors import (
    ModalDecompositionError,
    ModelFileError,
    PerronViolationError,
    PipelineStageError,
    TelemetryFormatError,
    UnknownChannelError,
)
from src.utils.logger import LoggerMixin, configure_logging, get_logger

__all__ = [
    "LoggerMixin",
    "configure_logging",
    "get_logger",
    "ModalDecompositionError",
    "ModelFileError",
    "PerronViolationError",
    "PipelineStageError",
    "TelemetryFormatError",
    "UnknownChannelError",
]
