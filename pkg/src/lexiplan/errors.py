"""Exception types shared across the package."""

from __future__ import annotations


class LexiplanError(Exception):
    """Base class for every error raised by lexiplan."""


class DimensionMismatch(LexiplanError, ValueError):
    pass


class LengthMismatch(LexiplanError, ValueError):
    pass


class RankOutOfRange(LexiplanError, ValueError):
    pass


class TauOutOfRange(LexiplanError, ValueError):
    pass


class InfeasibleParams(LexiplanError, ValueError):
    pass


class ValidationFailed(LexiplanError):
    """Raised when an instance or reward spec violates its invariants.

    ``violations`` holds every problem found, not just the first one.
    """

    def __init__(self, violations, context: str | None = None):
        self.violations = list(violations)
        self.context = context
        head = f"{context}: " if context else ""
        lines = "; ".join(str(v) for v in self.violations[:8])
        more = len(self.violations) - 8
        if more > 0:
            lines += f"; ... ({more} more)"
        super().__init__(f"{head}{len(self.violations)} violation(s): {lines}")


class DocumentError(LexiplanError):
    """Malformed instance/policy document. ``location`` is a key path or line:col."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class DuplicateEntry(DocumentError):
    def __init__(self, s: int, a: int, s_next: int, location: str | None = None):
        self.key = (s, a, s_next)
        super().__init__(f"duplicate entry for (s={s}, a={a}, s'={s_next})", location)


class BudgetExceeded(LexiplanError):
    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"enumeration of {count} policies exceeds budget {budget}")


class InvariantViolation(LexiplanError):
    """An internal invariant failed. Always a bug, never bad input."""


class EmptyActionSet(InvariantViolation):
    pass


class EmptySet(InvariantViolation):
    pass
