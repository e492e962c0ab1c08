"""Exception types shared across the package.

Every error raised on purpose by this package derives from :class:`LinsepError`,
so callers (most importantly the CLI) can distinguish contract violations from
genuine bugs.
"""

from __future__ import annotations


class LinsepError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(LinsepError, ValueError):
    """An argument violates a documented precondition."""


class FieldMismatchError(ContractError):
    """Two operands live in different prime fields."""


class SingularMatrixError(LinsepError, ValueError):
    """A square matrix has no inverse over its field."""


class InsufficientRankError(LinsepError, ValueError):
    """A matrix does not have the rank an operation requires."""

    def __init__(self, message: str, rank: int):
        super().__init__(message)
        self.rank = rank


class NoSolutionError(LinsepError, ValueError):
    """A linear system has no solution over the field."""


class WrongRegimeError(ContractError):
    """A scheme was invoked outside the parameter regime it supports."""


class InfeasibleAssignmentError(LinsepError, ValueError):
    """A task assignment cannot recover the requested functions.

    Carries the rank actually achieved by the stacked nullspace matrix.
    """

    def __init__(self, message: str, rank: int):
        super().__init__(message)
        self.rank = rank


class ProtocolViolationError(LinsepError, ValueError):
    """A simulated server touched an output outside its assigned tasks."""
