"""Exception hierarchy shared by every netprice module."""


class NetPriceError(Exception):
    """Base class for all library errors."""


class ValidationError(NetPriceError, ValueError):
    """An input object violates a model invariant (CLI exit code 2)."""


class SelfLoop(ValidationError):
    pass


class DegenerateInterval(ValidationError):
    pass


class NegativeLowerBound(ValidationError):
    pass


class NegativeInfluence(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NonNegativityViolated(ValidationError):
    pass


class EpsOutOfRange(ValidationError):
    pass


class DeltaOutOfRange(ValidationError):
    pass


class ZeroBasePrice(ValidationError):
    pass


class GridTooLarge(ValidationError):
    pass


class DegenerateExtraction(NetPriceError):
    """Every coordinate of a strategy block fell below the threshold."""


class SingularMatrixError(NetPriceError, ArithmeticError):
    """The matrix handed to an exact solver has determinant zero."""


class InternalInvariantViolation(NetPriceError, RuntimeError):
    """A proven algorithmic invariant failed at runtime (CLI exit code 3)."""
