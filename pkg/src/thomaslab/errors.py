"""Exception types shared across the package."""


class ThomasLabError(Exception):
    """Base class for every error raised by thomaslab."""


class DomainError(ThomasLabError, ValueError):
    """An argument lies outside the domain an operation supports."""


class IntegrationError(ThomasLabError, RuntimeError):
    """Numerical integration broke down (non-finite state or degenerate
    tangent factor). Carries the time at which it happened."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t = {t:g})")
        self.t = float(t)


class InsufficientDataError(ThomasLabError, RuntimeError):
    """A statistic was requested from data too short to support it."""


class SchemaError(ThomasLabError, ValueError):
    """A report file does not conform to its documented schema."""
