class ConfigurationError(ValueError):
    """Invalid grid, model or run configuration."""


class DomainError(ValueError):
    """Argument outside the domain of a price/demand function."""


class NumericalError(RuntimeError):
    """A linear solve or time march failed."""

    def __init__(self, message, step=None, iteration=None):
        super().__init__(message)
        self.step = step
        self.iteration = iteration


class UsageError(ValueError):
    """Bad command-line usage (unknown preset, out-of-range export request)."""
