"""Exception hierarchy shared across the package."""


class FDOError(Exception):
    """Base class for all package errors."""


class PotentialDomainError(FDOError, ValueError):
    """Argument outside the domain of a potential operation."""


class PotentialRangeError(FDOError, OverflowError):
    """Potential value not representable in double precision."""

    def __init__(self, x, message=None):
        self.x = x
        super().__init__(message or f"W(x) overflows at |x| = {abs(x)!r}")


class NonIntegrableError(FDOError, ValueError):
    """Gaussian smoothing or a certificate integral diverges."""


class QuadratureError(FDOError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class TruncationError(FDOError, ValueError):
    """A sampled function or window carries mass outside the grid."""


class CertificateError(FDOError):
    """A certified inequality could not be established."""


class NumericalError(FDOError, ArithmeticError):
    """An iterative linear-algebra kernel failed its contract."""


class ResolutionError(FDOError):
    """The discretization does not resolve the requested energy window."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics
        super().__init__(message)


class BoundViolation(FDOError, AssertionError):
    """A computed Riesz mean fell outside its certified bounds."""
