"""Exception types shared across the package."""


class DomainError(ValueError):
    """A scalar argument lies outside its mathematical domain."""


class ConditioningError(ValueError):
    """Conditioning on an event of (numerically) zero probability."""


class FactorizationError(ValueError):
    """A factor chain is inconsistent: dangling conditioning variables,
    duplicate producers, or a product that does not normalize."""
