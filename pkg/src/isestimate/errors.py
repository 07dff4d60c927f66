"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument is outside the documented domain."""


class ContractViolationError(RuntimeError):
    """A caller-established precondition turned out to be false."""


class BudgetExceededError(RuntimeError):
    """A strategy issued more queries than its budget allows."""
