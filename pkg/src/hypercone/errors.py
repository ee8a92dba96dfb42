"""Exception types shared across the package."""


class HyperconeError(Exception):
    """Base class for all package-specific errors."""


class UnknownLabelError(HyperconeError, KeyError):
    """A word references a label that is not part of the system."""


class ProductOverflowError(HyperconeError, OverflowError):
    """A raw matrix product exceeded the entry-magnitude cap."""


class AxisUndefinedError(HyperconeError):
    """The contraction axis is requested for a matrix with norm <= 1."""


class BudgetError(HyperconeError):
    """A word enumeration would exceed the configured node budget."""


class LengthsTooLargeError(HyperconeError):
    """Image lengths are >= 1 radian, so the partition exponent is ill-posed."""


class DegenerateSystemError(HyperconeError):
    """The requested statistic is undefined for this system (e.g. one word)."""


class DegenerateFitError(HyperconeError):
    """A regression or root fit has no information to work with."""


class HorizonError(HyperconeError, ZeroDivisionError):
    """A cross-section image lies on the chart's horizon."""


class BoundaryError(HyperconeError):
    """A point required to be interior lies on or outside the boundary."""


class SingularMatrixError(HyperconeError):
    """A matrix or basis is numerically singular."""


class InvarianceError(HyperconeError):
    """An operation requires strict invariance that does not hold."""


class SchemaError(HyperconeError, ValueError):
    """An input document does not conform to the expected schema."""
