"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ``ParseError``/``ValidationError`` -> 2,
``BudgetExceeded`` -> 3, ``ConsistencyError`` -> 4.
"""


class CoxDecompError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(CoxDecompError, ValueError):
    """Input violates a documented precondition."""


class ParseError(ValidationError):
    """Malformed input file; carries optional line/column diagnostics."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class BudgetExceeded(CoxDecompError):
    """A configured resource budget ran out before the computation finished.

    ``partial`` holds whatever progress information the operation could
    report (e.g. the number of kernels found so far).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial or {}


class ConsistencyError(CoxDecompError):
    """Two independent routes to the same answer disagree."""
