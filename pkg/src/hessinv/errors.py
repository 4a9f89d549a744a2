"""Exception types shared across the package."""


class HessinvError(Exception):
    """Base class for all package errors."""


class OutOfDomain(HessinvError):
    def __init__(self, point, message="point outside the domain"):
        self.point = point
        super().__init__(f"{message}: {point!r}")


class NotConvexHere(HessinvError):
    def __init__(self, point, min_eig):
        self.point = point
        self.min_eig = min_eig
        super().__init__(f"Hessian not positive definite at {point!r} (min eigenvalue {min_eig:.3e})")


class StencilOutOfDomain(OutOfDomain):
    def __init__(self, point):
        super().__init__(point, "finite-difference stencil leaves the domain")


class EquivalenceViolation(HessinvError):
    """Two residual families that must vanish together disagree.

    Raised only when an implementation bug is the likely cause.
    """

    def __init__(self, point, detail):
        self.point = point
        self.detail = detail
        super().__init__(f"equivalence violated at {point!r}: {detail}")


class BasePointHit(HessinvError):
    def __init__(self, point):
        self.point = point
        super().__init__(f"Hessian has a double eigenvalue at {point!r}; slope undefined")


class Singular(HessinvError):
    pass


class NotOrthogonalColumns(HessinvError):
    pass


class SignatureMismatch(HessinvError):
    pass


class NotOrthonormalFrame(HessinvError):
    pass


class NotInC(HessinvError):
    pass


class CurveLeavesDomain(OutOfDomain):
    def __init__(self, point):
        super().__init__(point, "curve leaves the domain")


class IntegratorToleranceExceeded(HessinvError):
    pass


class NoConvergence(HessinvError):
    def __init__(self, message, last_iterate=None):
        self.last_iterate = last_iterate
        super().__init__(message)


class ConvexityCertificateFailed(HessinvError):
    pass


class RegionOverlap(HessinvError):
    pass


class UnexpectedStratum(HessinvError):
    pass


class SpecError(HessinvError):
    """Malformed JSON function/domain spec."""
