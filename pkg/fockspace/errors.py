"""Exception hierarchy shared by every fockspace module."""

from __future__ import annotations


class FockspaceError(Exception):
    """Base class; ``position`` is the character offset for text inputs."""

    def __init__(self, message: str, *, position: int | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.position = position

    def __str__(self) -> str:
        if self.position is None:
            return self.message
        return f"{self.message} (at position {self.position})"


class ParseError(FockspaceError):
    pass


class CoefficientError(FockspaceError):
    pass


class DiagramError(FockspaceError):
    pass


class ChargeMismatchError(FockspaceError):
    pass


class ConfigurationError(FockspaceError):
    pass


class BudgetExceededError(FockspaceError):
    """Raised when an exhaustive search would exceed its candidate budget."""

    def __init__(self, message: str, *, count: int) -> None:
        super().__init__(message)
        self.count = count


class SelfCheckError(FockspaceError):
    pass
