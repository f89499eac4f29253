"""
Error Handling and Logging Module

This module provides centralized error handling and logging functionality for the
dynamics toolkit. It includes:
- The exception hierarchy raised by the library operations
- Logging configuration for the command-line front end
- User-facing error message templates
- Error frequency tracking and an ErrorContext for wrapping operations
"""

import logging
from typing import Optional, Dict, Any

# Handlers installed by setup_logging, so repeated calls do not stack them
_installed_handlers = []


# Configure logging
def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    Set up logging configuration

    Console output goes to stderr so report output on stdout stays clean.

    Args:
        log_level (str): Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file (str, optional): Log file path; no file handler when omitted
    """
    level = getattr(logging, str(log_level).upper(), logging.INFO)

    # Create formatter
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
    )

    root_logger = logging.getLogger()
    for handler in _installed_handlers:
        root_logger.removeHandler(handler)
    _installed_handlers.clear()

    # Set up console handler
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.setLevel(level)
    _installed_handlers.append(console_handler)

    # Set up file handler
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        file_handler.setLevel(level)
        _installed_handlers.append(file_handler)

    root_logger.setLevel(level)
    for handler in _installed_handlers:
        root_logger.addHandler(handler)

    logging.getLogger(__name__).debug("Logging system initialized")


class NDSError(Exception):
    """Base class of all toolkit errors"""

    error_type = 'system_error'


class SpaceMismatch(NDSError):
    error_type = 'space_mismatch'


class NotInvertible(NDSError):
    """Raised when an inverse is requested for a map that is not a bijection"""

    error_type = 'not_invertible'

    def __init__(self, message: str, flag: str = 'injective'):
        super().__init__(message)
        self.flag = flag


class HeterogeneousWindow(NDSError):
    error_type = 'heterogeneous_window'


class BadParameter(NDSError, ValueError):
    error_type = 'bad_parameter'


class EmptyHorizon(NDSError, ValueError):
    error_type = 'empty_horizon'


class Unsupported(NDSError):
    error_type = 'unsupported'


class NotPeriodic(NDSError):
    error_type = 'not_periodic'


class UnknownFixture(NDSError, KeyError):
    error_type = 'unknown_fixture'

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else 'unknown fixture'


class DocumentError(NDSError, ValueError):
    """Raised for malformed system documents; carries the failing schema path"""

    error_type = 'document_error'

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.detail = message


# Error message templates
ERROR_MESSAGES = {
    'space_mismatch': "❌ Point, region and map belong to different spaces.",
    'not_invertible': "🔁 The map is not a bijection and has no inverse.",
    'heterogeneous_window': "🧩 The window mixes maps on incompatible spaces.",
    'bad_parameter': "⚠️ Invalid parameter. Please check the command-line values.",
    'empty_horizon': "⏳ The horizon must be at least 1.",
    'unsupported': "🚧 This operation is not supported for the given system.",
    'not_periodic': "🔍 The schedule is not periodic within the search bound.",
    'unknown_fixture': "📚 Unknown fixture name. Use 'example list' to see the gallery.",
    'document_error': "📝 The system document does not match the schema.",
    'io_error': "📁 Could not read or write a file.",
    'system_error': "⚙️ System error occurred.",

    # Generic fallback
    'unknown_error': "❓ An unexpected error occurred."
}


class ErrorHandler:
    """Centralized error handler for the toolkit"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.error_counts = {}  # Track error frequencies

    def handle_application_error(self, error: Exception, operation: str) -> str:
        """
        Handle toolkit errors with a user-facing message and logging

        Args:
            error (Exception): The exception that occurred
            operation (str): Description of the operation that failed

        Returns:
            str: User-facing error message
        """
        if isinstance(error, NDSError):
            error_type = error.error_type
        elif isinstance(error, OSError):
            error_type = 'io_error'
        else:
            error_type = 'unknown_error'

        self._increment_error_count(f"{error_type}_{operation}")
        template = ERROR_MESSAGES.get(error_type, ERROR_MESSAGES['unknown_error'])

        # Log based on error severity
        if error_type in ('bad_parameter', 'document_error', 'unknown_fixture', 'empty_horizon'):
            self.logger.warning(f"Invalid input in {operation}: {error}")
        elif error_type in ('unsupported', 'not_periodic', 'not_invertible'):
            self.logger.info(f"Operation {operation} not applicable: {error}")
        else:
            self.logger.error(f"Error ({error_type}) in {operation}: {error}")

        return f"{template} {error}".strip()

    def _increment_error_count(self, error_key: str) -> None:
        """Track error frequency for monitoring"""
        self.error_counts[error_key] = self.error_counts.get(error_key, 0) + 1

        if self.error_counts[error_key] % 10 == 0:
            self.logger.warning(f"High frequency error: {error_key} occurred {self.error_counts[error_key]} times")

    def get_error_statistics(self) -> Dict[str, int]:
        """Get error frequency statistics"""
        return self.error_counts.copy()

    def reset_error_statistics(self) -> None:
        """Reset error frequency counters"""
        self.error_counts.clear()
        self.logger.info("Error statistics reset")


# Global error handler instance
error_handler = ErrorHandler()


class ErrorContext:
    """Context manager for handling errors in specific operations"""

    def __init__(self, operation: str):
        self.operation = operation
        self.error_message = None
        self.logger = logging.getLogger(__name__)

    def __enter__(self):
        self.logger.debug(f"Starting operation: {self.operation}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is not None:
            self.error_message = error_handler.handle_application_error(exc_val, self.operation)
            return False  # Don't suppress the exception
        self.logger.debug(f"Operation {self.operation} completed successfully")
        return True


def log_system_event(event: str, details: Optional[str] = None, level: str = 'INFO') -> None:
    """
    Log system events

    Args:
        event (str): Event description
        details (str, optional): Additional details
        level (str): Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    logger = logging.getLogger('system_events')
    log_message = f"System event: {event}"
    if details:
        log_message += f" - {details}"

    log_level = getattr(logging, level.upper(), logging.INFO)
    logger.log(log_level, log_message)


def error_summary() -> Dict[str, Any]:
    """Snapshot of the error counters for report footers and debugging"""
    counts = error_handler.get_error_statistics()
    return {'total': sum(counts.values()), 'by_key': counts}
