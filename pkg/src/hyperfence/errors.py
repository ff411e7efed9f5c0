"""Exception types shared across the package."""

from __future__ import annotations


class HyperfenceError(Exception):
    """Base class for all package-specific errors."""


class FormulaSyntaxError(HyperfenceError):
    """Raised on malformed formula or spec-file input.

    Carries the character offset of the offending token and, when known,
    the set of token kinds that would have been accepted there.
    """

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        detail = f"{message} (at offset {position}"
        if expected:
            detail += ", expected " + " or ".join(expected)
        detail += ")"
        super().__init__(detail)


class AlphabetError(HyperfenceError):
    """Raised on ill-formed alphabets or events outside the alphabet."""


class BudgetExceededError(HyperfenceError):
    """Raised when a construction would exceed its node budget."""


class UnrealizableError(HyperfenceError):
    """Raised when no enforcer strategy exists from the initial state."""


class StreamFormatError(HyperfenceError):
    """Raised on malformed event-stream input."""


class SessionOrderError(HyperfenceError):
    """Raised when session methods are called out of protocol order."""
