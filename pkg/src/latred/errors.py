"""Error types shared across the workbench.

Names are part of the package contract; CLI exit codes map onto them
(ParseError and file problems -> 66, PromiseViolation -> 2, BudgetExceeded -> 3).
"""

from __future__ import annotations


class LatredError(Exception):
    """Base class for all workbench errors."""


class ParseError(LatredError):
    """Malformed input: bad DIMACS/JSON structure, literal out of range,
    missing clause terminator, clause-count mismatch, duplicate literal."""


class TautologyError(LatredError):
    """A clause contains both x and its negation."""


class WidthError(LatredError):
    """A clause has the wrong number of literals for the requested operation."""


class TooLarge(LatredError):
    """Instance exceeds a brute-force size limit."""


class RankDeficient(LatredError):
    """Columns are linearly dependent. Carries a certificate when available:
    a nonzero rational kernel vector (basis validation) or the offending
    column indices (reduction construction)."""

    def __init__(self, message, kernel_vector=None, columns=None):
        super().__init__(message)
        self.kernel_vector = kernel_vector
        self.columns = columns


class RankTooLarge(LatredError):
    """Lattice rank exceeds the enumeration budget's max_rank."""


class BudgetExceeded(LatredError):
    """Enumeration visited more nodes than the budget allows."""

    def __init__(self, message, nodes=None):
        super().__init__(message)
        self.nodes = nodes


class PromiseViolation(LatredError):
    """A recomputed ground truth contradicts a stage's promise tag.

    Structured report, not a panic: .report holds the full numeric trace
    (the failing check plus every exact value involved).
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
