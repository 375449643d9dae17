"""Exception types shared across the library."""


class OcgeomError(Exception):
    """Base class for all library errors."""


class DomainError(OcgeomError):
    """Input outside the mathematical domain of an operation."""


class DegenerateError(OcgeomError):
    """Degenerate configuration (coincident points, zero exponent, ...)."""


class PoleError(OcgeomError):
    """Evaluation too close to a pole of a kernel or transformation."""


class AnnulusError(OcgeomError):
    """Point violates the annulus precondition of the glue map."""


class NotAntisymmetricError(OcgeomError):
    """Matrix expected to be antisymmetric is not."""


class ProjectiveError(OcgeomError):
    """Projective renormalization failed (third coordinate ~ 0)."""


class SouthPoleError(OcgeomError):
    """Cayley transform evaluated at (or too near) the southern point."""


class NotOnBoundaryError(OcgeomError):
    """Point does not satisfy the Siegel boundary equation."""


class ConvergenceError(OcgeomError):
    """Quadrature refinement failed to stabilize."""


class CapacityError(OcgeomError):
    """Requested enumeration exceeds the configured word budget."""


class InsufficientDataError(OcgeomError):
    """Not enough orbit points to run an estimator."""
