"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: ConfigError/DomainError -> 2,
AccuracyError -> 3, ResourceCapError -> 4.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A configuration (file, contour layout, spec block) is unusable."""


class AccuracyError(RuntimeError):
    """A numerical routine failed to reach its requested tolerance.

    Carries the best value obtained so far in ``best_value`` so callers can
    still inspect partial results.
    """

    def __init__(self, message, best_value=None, error_estimate=None):
        super().__init__(message)
        self.best_value = best_value
        self.error_estimate = error_estimate


class ResourceCapError(RuntimeError):
    """A configured resource cap (state space, degree, nodes) was exceeded."""
