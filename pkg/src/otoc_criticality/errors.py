"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
numerical failures exit 3, unresolved extrema exit 4.
"""


class OtocError(Exception):
    """Base class for all package errors."""


class ShapeError(OtocError):
    """Matrix dimensions incompatible with the requested operation."""


class HermiticityError(OtocError):
    """Input violates the Hermiticity tolerance; usually a model-builder bug."""


class ParameterError(OtocError):
    """Invalid parameter or configuration value."""


class NumericalError(OtocError):
    """A numerical routine (eigensolver) failed to converge."""


class ResourceError(OtocError):
    """Requested computation exceeds its hard size limit."""


class FitDomainError(OtocError):
    """Data outside the domain of a fit (non-positive values, too few points)."""


class UnresolvedExtremumError(OtocError):
    """An extremum landed on a grid boundary; the search window must be widened."""
