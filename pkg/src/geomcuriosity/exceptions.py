"""Exception hierarchy.

Every numerical failure derives from :class:`NumericalError` so the CLI can map
it to a single exit code.
"""


class GeomCuriosityError(Exception):
    """Base class for all package errors."""


class ConfigError(GeomCuriosityError, ValueError):
    """Invalid experiment or estimator configuration."""


class NumericalError(GeomCuriosityError, ArithmeticError):
    """A computation left its domain of validity."""


class SingularPlane(NumericalError):
    """A point lies on (or numerically near) the projective horizon."""


class DegenerateDirection(NumericalError):
    """Agent position coincides with the object, so no facing frame exists."""


class NotPositiveDefinite(NumericalError):
    """A covariance lost symmetry or positive definiteness."""


class SingularMass(NumericalError):
    """A belief puts non-negligible mass on a transform's horizon."""


class DegenerateCovariance(NumericalError):
    """Moment-matched covariance is not positive definite."""


class InsufficientCoverage(NumericalError):
    """Too much mapped sample mass falls outside the quadrature node grid."""
