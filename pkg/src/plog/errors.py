"""Exception hierarchy shared by every stage of the interpreter."""

from __future__ import annotations


class PlogError(Exception):
    """Base class for all interpreter errors."""


class PlogSyntaxError(PlogError):
    def __init__(self, message: str, line: int = 0, column: int = 0, expected: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        where = f"line {line}, column {column}: " if line else ""
        extra = f" (expected {expected})" if expected else ""
        super().__init__(f"{where}{message}{extra}")


class SortError(PlogError):
    """Undeclared sort or attribute, or an ill-sorted term."""


class RangeError(PlogError):
    """A probability value outside [0, 1]."""


class DuplicateDeclaration(PlogError):
    pass


class ProgramError(PlogError):
    """Structurally invalid statement, e.g. a pr-atom naming no selection rule."""


class TypeMismatch(PlogError):
    """Builtin arithmetic or comparison applied to non-integers."""


class UnboundedSort(PlogError):
    """A sort-defining program without a unique answer set."""


class BudgetExceeded(PlogError):
    pass


class UniverseTooLarge(PlogError):
    pass


class ProbabilityUndefined(PlogError):
    """The unnormalized measures of all worlds sum to zero."""


class Inconsistent(ProbabilityUndefined):
    """The program has no possible worlds."""


class ConditionViolation(PlogError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"program violates the well-formedness conditions: {lines}")


class DefaultUndefined(PlogError):
    pass


class NegativeDefault(PlogError):
    """Assigned probabilities exceed 1 while some values still need a default."""


class NetError(PlogError):
    """Malformed Bayesian network: cycle, bad domain, or CPT row not summing to 1."""
