"""Exception hierarchy shared by the tester, generators and oracles."""

from typing import Optional


class CycleTestError(Exception):
    """Base class for all errors raised by this package."""
    pass


class InvalidArgumentError(CycleTestError, ValueError):
    """Raised for out-of-range vertex ids, infeasible instance parameters and bad specs."""
    pass


class GraphFormatError(InvalidArgumentError):
    """Raised when a graph file violates the edge-list format, simplicity or the degree bound."""
    pass


class ResourceLimitError(CycleTestError):
    """Raised when a computation would exceed its configured budget.

    Attributes:
        required: Budget or sample count that would be needed (if known)
    """

    def __init__(self, message: str, required: Optional[int] = None) -> None:
        super().__init__(message)
        self.required = required


class TesterInvariantError(CycleTestError, AssertionError):
    """Raised when a per-run bound (explored edges, query count) does not hold."""
    pass
