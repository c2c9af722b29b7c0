"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Model or configuration parameters outside their admissible range."""


class PivotBreakdown(ArithmeticError):
    """A tridiagonal elimination met a pivot below the configured floor."""


class IntegrationError(RuntimeError):
    """Time integration could not be completed.

    Carries the dimensionless time reached and the last front position so
    callers can report where the run broke down.
    """

    def __init__(self, message: str, tau: float = float("nan"), h: float = float("nan")):
        super().__init__(f"{message} (tau={tau:.6g}, h={h:.6g})")
        self.tau = tau
        self.h = h


class ExperimentDataError(ValueError):
    """Malformed experimental measurement file."""


class ConfigError(ValueError):
    """Invalid configuration file or key."""
