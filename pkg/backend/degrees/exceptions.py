"""
Error hierarchy for the degree distribution library.

Every error carries the process exit code the management commands use
when they turn it into a CommandError.
"""

from typing import Optional


class TailfitError(Exception):
    """Base class for all library errors"""
    exit_code = 1


class InvalidParameterError(TailfitError, ValueError):
    """Model parameters, fit configuration or sample spec are invalid"""
    exit_code = 2


class DegenerateSupportError(InvalidParameterError):
    """The requested support is empty or starts below degree 1"""
    exit_code = 2


class InvalidToleranceError(InvalidParameterError):
    exit_code = 2


class DomainError(TailfitError, ValueError):
    """A degree lies outside the support of a distribution"""
    exit_code = 2


class EmptySupportError(TailfitError):
    """Nothing survives truncation at the requested minimum degree"""
    exit_code = 2


class InsufficientDataError(TailfitError):
    exit_code = 2


class ZeroVarianceError(TailfitError):
    exit_code = 2


class MismatchedSupportError(TailfitError):
    """Model and empirical distribution start at different minimum degrees"""
    exit_code = 2


class HistogramParseError(TailfitError):
    exit_code = 4

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SearchFailureError(TailfitError):
    """The fit objective was non-finite at every evaluated point"""
    exit_code = 5


class ConvergenceError(TailfitError):
    """A truncated infinite sum did not meet its tolerance within the term cap"""
    exit_code = 5
