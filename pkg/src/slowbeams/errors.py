"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class FitError(RuntimeError):
    """A fit could not be carried out or did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class IntegrationError(RuntimeError):
    """A time integration produced a non-finite state."""

    def __init__(self, message, step=None, particle=None):
        super().__init__(message)
        self.step = step
        self.particle = particle


class StepSizeError(ValueError):
    """The requested time step does not resolve the fastest time scale."""

    def __init__(self, message, suggested_dt):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class ThresholdNotFound(RuntimeError):
    """No power in a scan crossed the self-organization criterion."""
