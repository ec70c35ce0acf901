"""Exception types shared across the package."""


class ApnlabError(Exception):
    """Base class for errors raised by this package."""


class ParseError(ApnlabError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConsistencyError(ApnlabError):
    """Two independent computations of the same quantity disagree.

    This always signals an implementation bug, never bad input.
    """
