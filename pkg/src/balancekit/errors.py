"""Exception hierarchy shared by every balancekit module."""


class BalanceKitError(Exception):
    """Base class for all errors raised by balancekit."""


class ValidationError(BalanceKitError, ValueError):
    """Input violates a documented precondition."""


class DomainMismatchError(ValidationError):
    """A partition does not cover the vertex set it is evaluated against."""


class UndefinedPercentError(BalanceKitError, ArithmeticError):
    """Percent imbalance requested on a graph without edges."""


class FormatError(ValidationError):
    """A text file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptySelectionError(ValidationError):
    """A vote selection kept no active MEP."""
