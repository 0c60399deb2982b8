"""Error types shared across the package."""


class PdeCertError(Exception):
    """Base class for all package errors."""


class DomainError(PdeCertError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class InvalidFieldError(PdeCertError, ValueError):
    """Field samples are not finite or have the wrong shape."""


class InvalidCoefficientError(PdeCertError, ValueError):
    """A coefficient callable returned NaN/inf or a badly shaped array."""


class UnsupportedOrderError(PdeCertError, ValueError):
    pass


class UnsupportedDimensionError(PdeCertError, ValueError):
    pass


class StepRejectedError(PdeCertError):
    """Raised when a requested time step violates the stability limit."""

    def __init__(self, message, suggested_dt):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class BlowUpSuspectedError(PdeCertError):
    pass


class InsufficientDataError(PdeCertError):
    pass


class RejectedSampleError(PdeCertError):
    """Sample has tails that are significant at the box boundary."""


class EmptyCorpusError(PdeCertError):
    pass


class ConfigError(PdeCertError):
    """Bad scenario configuration. `line` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
