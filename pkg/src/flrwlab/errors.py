"""Exception types shared across the package."""


class FlrwLabError(Exception):
    """Base class for all package errors."""


class DomainError(FlrwLabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class RegimeError(FlrwLabError, ValueError):
    """Parameters violate a hypothesis of the estimate being evaluated."""


class SingularityError(FlrwLabError, ValueError):
    """Evaluation requested at a singular point (e.g. Y at x = 0)."""


class ConfigurationError(FlrwLabError, ValueError):
    """A run configuration is internally inconsistent (grid, horizon, data)."""


class FitError(FlrwLabError, ValueError):
    """Decay-rate fit impossible (empty window, non-positive norms)."""
