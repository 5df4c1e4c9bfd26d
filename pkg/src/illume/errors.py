"""Exception hierarchy shared by all modules."""


class IllumeError(Exception):
    """Base class for every error raised by the library."""


class InvalidBody(IllumeError, ValueError):
    pass


class InvalidParameter(IllumeError, ValueError):
    pass


class UnsupportedDimension(IllumeError, ValueError):
    pass


class UnsupportedBody(IllumeError, ValueError):
    pass


class OriginNotInterior(IllumeError, ValueError):
    pass


class NotOnBoundary(IllumeError, ValueError):
    pass


class OutOfChart(IllumeError, ValueError):
    pass


class ChartOverflow(IllumeError):
    pass


class ProfileUnbounded(IllumeError):
    pass


class DegenerateTriangle(IllumeError, ValueError):
    pass


class GeodesicMeetsBody(IllumeError, ValueError):
    pass


class PointOnBoundary(IllumeError, ValueError):
    pass


class BodyTouchesDomain(IllumeError, ValueError):
    pass


class DeltaOutOfRange(IllumeError, ValueError):
    pass


class Saturated(IllumeError):
    """The illumination body no longer changes with delta (spherical caps)."""


class NumericalFailure(IllumeError, RuntimeError):
    """A bisection or quadrature did not reach its target tolerance."""
