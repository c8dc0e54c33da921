"""Shared exception types."""


class SomascopeError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(SomascopeError):
    """Bad configuration: empty required input, inconsistent thresholds, missing file."""


class ParseError(SomascopeError):
    """Malformed input data; carries a line number when one is known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DataError(SomascopeError):
    """Valid syntax but unusable values (duplicates, degenerate statistics inputs)."""
