"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ConditionError(ValueError):
    """Minimum-power condition for a non-negative secrecy rate is violated."""


class RateError(ValueError):
    """A rate that must be strictly positive is zero or negative."""


class FeasibilityError(ValueError):
    """An allocation or scenario violates its constraints."""


class GridGuardError(ValueError):
    """A brute-force grid would exceed the evaluation budget."""


class ConfigError(ValueError):
    """A run-configuration document is malformed."""
