class MixingError(Exception):
    """Base class of every exception raised by this package"""


class DegreeMismatchError(MixingError):
    """Exception thrown when two objects that must live on the same S_n do not"""

    def __init__(self, left: int, right: int, *args):
        self.left = left
        self.right = right
        super().__init__(f"Degree mismatch: {left} != {right}", *args)


class ExhaustiveLimitError(MixingError):
    """Exception thrown when an exhaustive computation would exceed its cap"""

    limit: int
    requested: int

    def __init__(self, what: str, limit: int, requested: int, *args):
        self.limit = limit
        self.requested = requested
        super().__init__(
            f"{what}: requested {requested} exceeds the exhaustive limit {limit}", *args
        )


class BudgetExceededError(MixingError):
    """Exception thrown when an enumeration needs more work than its budget allows"""

    budget: int
    requested: int

    def __init__(self, what: str, budget: int, requested: int, *args):
        self.budget = budget
        self.requested = requested
        super().__init__(f"{what}: needs {requested}, budget is {budget}", *args)


class SpaceMismatchError(MixingError):
    """Exception thrown when two state distributions live on different spaces"""
