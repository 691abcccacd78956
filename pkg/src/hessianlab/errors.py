"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularMetricError(ValueError):
    """A metric matrix is not positive definite (within tolerance).

    Carries the grid index of the failing point when raised from a field
    operation, else ``point`` is None.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConeViolationError(ValueError):
    """An eigenvalue tuple left the required positivity cone.

    Attributes
    ----------
    point : tuple or None
        Grid index of the worst offending point.
    margin : float or None
        Worst normalized cone margin found.
    """

    def __init__(self, message, point=None, margin=None):
        super().__init__(message)
        self.point = point
        self.margin = margin


class NonConvergenceError(RuntimeError):
    """The Newton iteration failed to reach the requested tolerance.

    ``diagnostics`` holds a dict with the residual history and the state of
    the line search when the failure occurred.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(ValueError):
    """An experiment configuration failed validation."""
