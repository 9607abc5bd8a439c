"""Exception hierarchy shared by every module."""


class SusyptError(Exception):
    """Base class for all library errors."""


class ParameterError(SusyptError, ValueError):
    """A parameter set violates the constraints of its family."""


class DomainError(SusyptError, ValueError):
    """A coordinate or grid lies outside the family's domain."""


class GridError(SusyptError, ValueError):
    """A grid is malformed or too small for the requested computation."""


class DegenerateRecurrenceError(SusyptError, ArithmeticError):
    """A Jacobi recurrence denominator vanished for the given indices."""


class BoundStateError(SusyptError, ValueError):
    """Requested level does not exist as a normalizable bound state."""

    def __init__(self, message, n_max=None):
        super().__init__(message)
        self.n_max = n_max


class ConvergenceError(SusyptError, RuntimeError):
    """QR iteration failed to deflate an eigenvalue."""

    def __init__(self, message, window=None):
        super().__init__(message)
        self.window = window
