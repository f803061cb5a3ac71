"""Exception types raised by the geometry operations."""


class HilbertGeometryError(Exception):
    """Base class for all library errors."""


class FewerThanThreeVertices(HilbertGeometryError):
    pass


class NotStrictlyConvex(HilbertGeometryError):
    pass


class DuplicateVertex(HilbertGeometryError):
    pass


class PointNotInterior(HilbertGeometryError):
    pass


class NonpositiveRadius(HilbertGeometryError):
    pass


class DirectionNotInward(HilbertGeometryError):
    pass


class EmptySiteSet(HilbertGeometryError):
    pass


class CoincidentSites(HilbertGeometryError):
    pass


class DegenerateTriple(HilbertGeometryError):
    pass


class SearchDidNotConverge(HilbertGeometryError):
    pass


class TooFewSites(HilbertGeometryError):
    pass


class DuplicateSites(HilbertGeometryError):
    pass


class DuplicateSite(HilbertGeometryError):
    pass


class GeneralPositionViolation(HilbertGeometryError):
    pass


class InternalInvariantViolation(HilbertGeometryError):
    pass
