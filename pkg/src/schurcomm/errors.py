"""Exception hierarchy for schurcomm."""


class SchurCommError(Exception):
    """Base class for all errors raised by this package."""


class NotSquare(SchurCommError, ValueError):
    pass


class NotHermitian(SchurCommError, ValueError):
    """Raised when a matrix fails the Hermiticity check.

    The largest entrywise asymmetry is kept on ``max_asymmetry``.
    """

    def __init__(self, msg, max_asymmetry):
        super().__init__(msg)
        self.max_asymmetry = max_asymmetry


class DimMismatch(SchurCommError, ValueError):
    pass


class FunctionUndefinedAtSpectrum(SchurCommError, ValueError):
    def __init__(self, msg, eigenvalue):
        super().__init__(msg)
        self.eigenvalue = eigenvalue


class BoundInapplicable(SchurCommError, ValueError):
    """Raised when the row-norm series for a multiplier diverges."""


class NonIntegrable(SchurCommError, ValueError):
    pass


class HolderBoundViolated(SchurCommError, ValueError):
    def __init__(self, msg, pair):
        super().__init__(msg)
        self.pair = pair


class POutOfRange(SchurCommError, ValueError):
    pass


class NoPositiveSpectrum(SchurCommError, ValueError):
    pass


class NonInvertible(SchurCommError, ValueError):
    pass


class AmbiguousKernel(SchurCommError, ValueError):
    """Numeric kernel detection disagrees with construction metadata."""


class NotPositive(SchurCommError, ValueError):
    pass


class ConfigInvalid(SchurCommError, ValueError):
    pass
