"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where a formula is defined."""


class UnsupportedConfigurationError(ValueError):
    """The requested operation does not support this parameter set."""


class DegenerateSteadyStateError(RuntimeError):
    """The Liouvillian has more than one stationary state."""

    def __init__(self, null_dim, message=None):
        self.null_dim = null_dim
        if message is None:
            dim = "unknown (>= 2)" if null_dim is None else str(null_dim)
            message = f"steady state is not unique: null-space dimension {dim}"
        super().__init__(message)


class StepSizeError(RuntimeError):
    """Time integration drifted beyond tolerance; reduce dt."""


class SingularSystemError(RuntimeError):
    def __init__(self, condition_number):
        self.condition_number = condition_number
        super().__init__(f"moment system is singular (condition number {condition_number:.3e})")


class ConfigError(ValueError):
    """Invalid or contradictory run configuration; ``field`` names the culprit."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
