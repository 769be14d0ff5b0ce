"""Exception types raised across the package."""


class FreezeCAError(Exception):
    """Base class for all package errors."""


class EmptyPointSet(FreezeCAError, ValueError):
    pass


class NotSeparable(FreezeCAError, ValueError):
    pass


class OriginInHull(FreezeCAError, ValueError):
    pass


class OriginInNeighborSet(FreezeCAError, ValueError):
    pass


class EmptySetMeansConstant(FreezeCAError, ValueError):
    pass


class NotMonotoneFreezing(FreezeCAError, ValueError):
    pass


class RadiusTooLarge(FreezeCAError, ValueError):
    pass


class AlphabetMismatch(FreezeCAError, ValueError):
    pass


class ExactnessViolated(FreezeCAError, RuntimeError):
    """A query needed cells outside the exactly-known region of a window."""


class NotStronglySubcritical(FreezeCAError, ValueError):
    pass


class ObstacleVerificationFailed(FreezeCAError, RuntimeError):
    """An obstacle construction produced a set that is not a fixed point.

    This signals a bug in the construction and is never swallowed.
    """


class BudgetExceeded(FreezeCAError, RuntimeError):
    """A Turing machine did not halt within the allowed number of steps."""
