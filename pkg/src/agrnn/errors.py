"""Exception types shared across the package."""


class AgrnnError(Exception):
    """Base class for all package-specific errors."""


class InvalidConfigError(AgrnnError):
    """A configuration value is out of range or inconsistent."""


class UnsupportedDerivativeError(AgrnnError):
    """A derivative order was requested that the activation cannot provide."""


class DegenerateSpaceError(AgrnnError):
    """An operation would leave a function space with no basis functions."""


class SingularSystemError(AgrnnError):
    """All columns of a least-squares system fell below the rank tolerance."""


class ZeroSignalError(AgrnnError):
    """A signal whose spectrum is needed is identically zero."""


class DegenerateRangeError(AgrnnError):
    """A pilot solution is constant, so its range cannot be partitioned."""


class EmptySegmentError(AgrnnError):
    """A range segment received no interior collocation points."""


class IterationFailureError(AgrnnError):
    """A nonlinear solve failed mid-iteration; carries the partial log."""

    def __init__(self, message: str, log=None):
        super().__init__(message)
        self.log = log
