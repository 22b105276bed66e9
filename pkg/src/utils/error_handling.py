"""
Error handling utilities for liedim.

This module provides centralized error handling functionality, including:
- Custom exception classes carrying a process exit code
- Decorator that turns exceptions raised by CLI commands into exit codes
- Helper functions for consistent machine-readable error records
"""
import functools
import logging
import sys
import time
from typing import Callable, Any, Dict, List, Optional

from pydantic import BaseModel

logger = logging.getLogger(__name__)

# Exit codes of the command line. Unexpected exceptions also exit with
# EXIT_INPUT_ERROR; their error record has internal=true.
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


class LieDimError(Exception):
    """Base exception class for all liedim errors."""
    def __init__(self, message: str, exit_code: int = EXIT_INPUT_ERROR, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class InputError(LieDimError):
    """Exception raised for malformed user input (files, flags, query parameters)."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_INPUT_ERROR, details=details)


class PresentationSyntaxError(InputError):
    """Exception raised when a presentation file does not match the grammar."""
    def __init__(self, message: str, line: int, column: int, expected: Optional[List[str]] = None):
        self.line = line
        self.column = column
        self.expected = expected or []
        super().__init__(
            f"line {line}, column {column}: {message}",
            details={"line": line, "column": column, "expected": self.expected}
        )


class UndeclaredGeneratorError(InputError):
    """Exception raised when a relator uses a symbol missing from the gens: line."""
    def __init__(self, name: str, line: int, column: int):
        self.name = name
        self.line = line
        self.column = column
        super().__init__(
            f"line {line}, column {column}: undeclared generator '{name}'",
            details={"name": name, "line": line, "column": column}
        )


class InvalidQueryError(InputError):
    """Exception raised for out-of-range degrees, caps or indices."""


class ContextMismatchError(LieDimError):
    """Exception raised when values built over different contexts are combined."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_INPUT_ERROR, details=details)


class LatticeError(LieDimError):
    """Exception raised for inconsistent lattice arguments (ranks, containment)."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_INPUT_ERROR, details=details)


class ConfigurationError(LieDimError):
    """Exception raised for malformed environment configuration."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_INPUT_ERROR, details=details)


class ErrorResponse(BaseModel):
    """Standard error record written to standard error by the CLI."""
    error: str
    error_type: str
    exit_code: int
    details: Optional[Dict[str, Any]] = None
    timestamp: str
    command: Optional[str] = None
    internal: bool = False


def handle_exception(exc: Exception, command: Optional[str] = None) -> ErrorResponse:
    """
    Convert an exception to a standardized ErrorResponse object.

    Args:
        exc: The exception to handle
        command: Optional name of the subcommand that failed

    Returns:
        ErrorResponse: Standardized error record
    """
    timestamp = time.strftime("%Y-%m-%d %H:%M:%S UTC", time.gmtime())

    if isinstance(exc, LieDimError):
        exit_code = exc.exit_code
        error_message = exc.message
        details = exc.details
    else:
        exit_code = EXIT_INPUT_ERROR
        error_message = str(exc) or "Unknown error"
        details = {}

    if isinstance(exc, InputError):
        logger.warning(
            f"Input error: {error_message}",
            extra={"command": command, "exit_code": exit_code}
        )
    else:
        logger.error(
            f"Error running command: {error_message}",
            exc_info=exc,
            extra={"command": command}
        )

    return ErrorResponse(
        error=error_message,
        error_type=type(exc).__name__,
        exit_code=exit_code,
        details=details,
        timestamp=timestamp,
        command=command,
        internal=not isinstance(exc, LieDimError)
    )


def error_handler(func: Callable[..., int]) -> Callable[..., int]:
    """
    Decorator for CLI command functions.

    The wrapped function returns an exit code; any exception it raises is
    converted to an ErrorResponse printed on standard error and the
    matching exit code is returned instead.

    Args:
        func: The command function to wrap

    Returns:
        Callable: Wrapped function with error handling
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            return func(*args, **kwargs)
        except Exception as exc:
            error_response = handle_exception(exc, command=func.__name__)
            print(error_response.model_dump_json(), file=sys.stderr)
            return error_response.exit_code

    return wrapper
