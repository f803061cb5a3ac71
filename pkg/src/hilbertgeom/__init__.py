"""Computational geometry in the Hilbert metric of a convex polygon.

Core surface: polygon/boundary primitives, the Hilbert distance and balls,
bisector queries, circumcircles, the augmented Delaunay triangulation, and
the Hilbert hull, plus a JSON/SVG command line front end.
"""

from .polygon import (
    BoundaryPoint,
    Chord,
    ConvexPolygon,
    Point2,
    SupportingLine,
    chord_through,
    contains_interior,
    make_polygon,
    regular_polygon,
    spokes,
    supporting_lines_at,
)
from .metric import (
    BallAtInfinity,
    HilbertBall,
    ball_at_infinity,
    hilbert_ball,
    hilbert_distance,
    min_empty_ball_at_infinity,
)

__all__ = [
    "BallAtInfinity",
    "BoundaryPoint",
    "Chord",
    "ConvexPolygon",
    "HilbertBall",
    "Point2",
    "SupportingLine",
    "ball_at_infinity",
    "chord_through",
    "contains_interior",
    "hilbert_ball",
    "hilbert_distance",
    "make_polygon",
    "min_empty_ball_at_infinity",
    "regular_polygon",
    "spokes",
    "supporting_lines_at",
]

__version__ = "0.1.0"
