"""Exception hierarchy shared by all aqabound modules."""


class AqaboundError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(AqaboundError, ValueError):
    """Operands live on different bases or have inconsistent sizes."""


class NumericIntegrityError(AqaboundError, ArithmeticError):
    """A quantity that must be real/nonnegative came out otherwise beyond roundoff."""


class NonHermitianError(AqaboundError, ValueError):
    pass


class EigensolverError(AqaboundError, RuntimeError):
    pass


class SizeCapError(AqaboundError, ValueError):
    """The requested instance exceeds the desk-scale size cap."""


class PropertyViolation(AqaboundError, AssertionError):
    """An inequality that holds as a theorem was violated by computed data."""


class IntegrationQualityError(AqaboundError, RuntimeError):
    """Accumulated norm drift shows the time step is too coarse."""


class GraphParseError(AqaboundError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
