"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
these rather than bare RuntimeError/ValueError when the condition fits.
"""


class NumericalError(RuntimeError):
    """A numeric routine failed to converge or produced NaN/Inf."""


class StabilityError(ValueError):
    """A queue was driven at or beyond its service capacity."""


class InfeasibilityError(ValueError):
    """A constrained optimization has an empty feasible set."""
