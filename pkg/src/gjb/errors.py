"""Exception hierarchy.

Everything raised on purpose by this package derives from GjbError, so
callers (the CLI in particular) can map failures to exit codes without
pattern-matching on messages.
"""

from __future__ import annotations


class GjbError(Exception):
    """Base class for all library errors."""


class StructuralError(GjbError):
    """Objects from different charts were combined, or a chart is malformed."""


class DegreeError(GjbError):
    """An operation received arguments of incompatible graded degree."""


class DomainError(GjbError):
    """A value escapes the domain an operation is defined on.

    Examples: evaluating a Laurent coefficient where a nonvanishing
    coordinate is zero, inverting a non-unit, membership queries failing.
    """


class ValidationError(GjbError):
    """A structured object failed its defining equations.

    Carries the offending residuals so tests and the CLI can show what is
    actually nonzero.
    """

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


class ParseError(GjbError):
    """Expression text could not be tokenized or parsed."""

    def __init__(self, message: str, line: int = 1, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
