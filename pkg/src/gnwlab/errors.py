"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class ResourceBudgetError(RuntimeError):
    """A request would exceed a hard resource budget (enumeration size, edge count)."""


class QuadratureError(RuntimeError):
    """Numerical integration failed to reach the requested tolerance."""


class ConfigError(ValueError):
    """A configuration file is malformed or violates a constraint."""
