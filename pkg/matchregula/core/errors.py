"""
Error types and classification for matchregula.

Every error raised by the library derives from :class:`MatchregulaError` and
carries a category and severity so the CLI can choose an exit code and a log
level without inspecting messages.
"""

import logging
from enum import Enum
from typing import Any, Optional

logger = logging.getLogger(__name__)


class ErrorSeverity(Enum):
    """Error severity levels."""

    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class ErrorCategory(Enum):
    """Error categories for classification."""

    VALIDATION_ERROR = "validation_error"
    DEGENERATE_ERROR = "degenerate_error"
    NUMERICAL_ERROR = "numerical_error"
    IO_ERROR = "io_error"
    INTERNAL_ERROR = "internal_error"


class MatchregulaError(Exception):
    """Base class for all matchregula errors."""

    category: ErrorCategory = ErrorCategory.INTERNAL_ERROR
    severity: ErrorSeverity = ErrorSeverity.HIGH

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": type(self).__name__,
            "category": self.category.value,
            "severity": self.severity.value,
            "message": self.message,
            "context": {k: v for k, v in self.context.items() if v is not None},
        }


class DatasetParseError(MatchregulaError, ValueError):
    """A dataset file could not be parsed into a valid Dataset."""

    category = ErrorCategory.VALIDATION_ERROR
    severity = ErrorSeverity.MEDIUM

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[str] = None
    ):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        full = f"{message} ({', '.join(location)})" if location else message
        super().__init__(full, row=row, column=column)
        self.row = row
        self.column = column


class ConfigError(MatchregulaError, ValueError):
    """Invalid or unparsable experiment configuration."""

    category = ErrorCategory.VALIDATION_ERROR
    severity = ErrorSeverity.MEDIUM

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None
    ):
        full = message
        if line is not None:
            full = f"{message} (line {line}, column {column})"
        super().__init__(full, line=line, column=column)
        self.line = line
        self.column = column


class ContractError(MatchregulaError, ValueError):
    """A precondition of an operation was violated by the caller."""

    category = ErrorCategory.VALIDATION_ERROR
    severity = ErrorSeverity.MEDIUM


class DegenerateInputError(MatchregulaError, ArithmeticError):
    """Input data carries too little information for the requested quantity."""

    category = ErrorCategory.DEGENERATE_ERROR
    severity = ErrorSeverity.MEDIUM


class DegenerateDesign(MatchregulaError):
    """No valid matching exists (no treated units, or more treated than controls)."""

    category = ErrorCategory.DEGENERATE_ERROR
    severity = ErrorSeverity.LOW


class SingularDesign(MatchregulaError, ArithmeticError):
    """A design or covariance matrix is numerically rank deficient."""

    category = ErrorCategory.NUMERICAL_ERROR
    severity = ErrorSeverity.MEDIUM


_EXIT_CODES = {
    ErrorCategory.VALIDATION_ERROR: 1,
    ErrorCategory.DEGENERATE_ERROR: 1,
    ErrorCategory.NUMERICAL_ERROR: 1,
    ErrorCategory.IO_ERROR: 1,
    ErrorCategory.INTERNAL_ERROR: 2,
}


def exit_code_for(error: BaseException) -> int:
    """Map an exception to a CLI exit code (1 user error, 2 internal error)."""
    if isinstance(error, MatchregulaError):
        return _EXIT_CODES[error.category]
    if isinstance(error, OSError):
        return 1
    return 2


def log_error(error: MatchregulaError) -> None:
    """Log an error at a level chosen by its severity."""
    if error.severity == ErrorSeverity.CRITICAL:
        logger.critical(error.message)
    elif error.severity == ErrorSeverity.HIGH:
        logger.error(error.message)
    elif error.severity == ErrorSeverity.MEDIUM:
        logger.warning(error.message)
    else:
        logger.info(error.message)
