"""Exception types raised across the package."""


class TdhoError(Exception):
    """Base class for all package errors."""


class ScheduleDomainError(TdhoError, ValueError):
    """Bad schedule definition or evaluation at t < 0."""


class ScheduleRangeError(TdhoError, ValueError):
    """Query outside a tabulated schedule's time range."""


class FrequencyDomainError(TdhoError, ValueError):
    """k0 + c J is not positive, so the mode frequency is not real."""

    def __init__(self, message: str, t: float | None = None, value: float | None = None):
        super().__init__(message)
        self.t = t
        self.value = value


class IntegrationError(TdhoError, RuntimeError):
    """The Ermakov scale factor collapsed towards zero."""

    def __init__(self, message: str, last_t: float | None = None):
        super().__init__(message)
        self.last_t = last_t


class StepSizeError(IntegrationError):
    """Adaptive step size underflowed."""


class TrajectoryRangeError(TdhoError, ValueError):
    """Time outside a solved trajectory's domain."""


class CapabilityError(TdhoError, ValueError):
    """Request exceeds a documented order/size bound."""


class DegenerateCouplingError(TdhoError, ValueError):
    """General three-oscillator couplings are (nearly) all equal."""


class StabilityError(TdhoError, ValueError):
    """A normal-mode frequency would be imaginary."""


class CompositionDomainError(TdhoError, ValueError):
    """Series composition outside the scalar function's domain."""


class QuadratureOrderError(TdhoError, ValueError):
    """Quadrature rule is not exact for the requested polynomial degree."""

    def __init__(self, message: str, required_order: int):
        super().__init__(message)
        self.required_order = required_order
