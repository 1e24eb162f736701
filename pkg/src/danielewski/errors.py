"""Exception hierarchy shared by all modules."""


class DanielewskiError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DanielewskiError, ValueError):
    pass


class NotDivisible(DanielewskiError, ArithmeticError):
    pass


class UnsupportedDivisor(DanielewskiError, ValueError):
    pass


class ParameterUnbound(DanielewskiError, ValueError):
    pass


class NotTangent(DanielewskiError, ValueError):
    pass


class NotRegular(DanielewskiError, ArithmeticError):
    """A chart expression did not come from a regular function on the surface."""


class KernelViolation(DanielewskiError, ValueError):
    """Multiplier is not in the (iterated) kernel of the field."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotLND(DanielewskiError, ValueError):
    pass


class NotVolumePreserving(DanielewskiError, ValueError):
    pass


class CapTooSmall(DanielewskiError, ValueError):
    pass


class ResidualBlowup(DanielewskiError, ArithmeticError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class DegeneratePoints(DanielewskiError, ValueError):
    pass


class Exhausted(DanielewskiError, RuntimeError):
    pass


class PlanningFailed(DanielewskiError, RuntimeError):
    pass


class NewtonStalled(DanielewskiError, RuntimeError):
    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment
