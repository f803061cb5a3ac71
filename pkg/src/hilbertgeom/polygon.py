"""The convex domain polygon and boundary-indexed primitives.

The boundary of an m-gon is addressed by a cyclic coordinate
``s = edge + t`` in [0, m): ``edge`` is the index of the directed edge
(vertices[edge] -> vertices[edge+1 mod m]) and ``t`` in [0, 1) the
parameter along it. Points at a vertex are canonicalized to t = 0 on the
outgoing edge, so the representation is unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, tolerances
from .errors import (
    DuplicateVertex,
    FewerThanThreeVertices,
    NotStrictlyConvex,
    PointNotInterior,
)


@dataclass(frozen=True, slots=True)
class Point2:
    x: float
    y: float

    def __add__(self, other):
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Point2(self.x - other.x, self.y - other.y)

    def __mul__(self, s):
        return Point2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self):
        return Point2(-self.x, -self.y)

    def cross(self, other):
        return self.x * other.y - self.y * other.x

    def dot(self, other):
        return self.x * other.x + self.y * other.y

    def norm(self):
        return math.hypot(self.x, self.y)

    def unit(self):
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Point2(self.x / n, self.y / n)

    def rot90(self):
        """Counterclockwise quarter turn."""
        return Point2(-self.y, self.x)

    def is_finite(self):
        return math.isfinite(self.x) and math.isfinite(self.y)

    def as_tuple(self):
        return (self.x, self.y)


@dataclass(frozen=True, slots=True)
class BoundaryPoint:
    point: Point2
    edge: int
    t: float

    @property
    def s(self):
        return self.edge + self.t

    def is_vertex(self):
        return self.t == 0.0


@dataclass(frozen=True, slots=True)
class Chord:
    """A maximal segment of the domain: two boundary points, interior open
    segment strictly inside."""

    a: BoundaryPoint
    b: BoundaryPoint


@dataclass(frozen=True, slots=True)
class SupportingLine:
    anchor: BoundaryPoint
    direction: Point2  # unit


class ConvexPolygon:
    """Strictly convex CCW polygon; construct through :func:`make_polygon`."""

    def __init__(self, vertices):
        self.vertices = tuple(vertices)
        self.m = len(self.vertices)
        self.xs = np.array([v.x for v in self.vertices], dtype=np.float64)
        self.ys = np.array([v.y for v in self.vertices], dtype=np.float64)
        w = float(self.xs.max() - self.xs.min())
        h = float(self.ys.max() - self.ys.min())
        self.diam = math.hypot(w, h)
        self.centroid = Point2(float(self.xs.mean()), float(self.ys.mean()))

    # -- tolerances scaled to this polygon's size

    def eps_len(self):
        return tolerances.eps_geom() * self.diam

    def boundary_eps_len(self):
        return tolerances.EPS_BOUNDARY * self.diam

    # -- vertices and edges

    def vertex(self, i):
        return self.vertices[i % self.m]

    def edge_vector(self, i):
        i %= self.m
        return self.vertices[(i + 1) % self.m] - self.vertices[i]

    def edge_line(self, i):
        """Edge line as (a, b, c) with a*x + b*y + c = 0, (a, b) the unit
        inward normal, so the form is positive strictly inside."""
        i %= self.m
        v = self.vertices[i]
        e = self.edge_vector(i).unit()
        n = e.rot90()  # inward for CCW
        return (n.x, n.y, -(n.x * v.x + n.y * v.y))

    def point_at(self, edge, t):
        edge %= self.m
        v = self.vertices[edge]
        e = self.edge_vector(edge)
        return Point2(v.x + t * e.x, v.y + t * e.y)

    def boundary_point(self, edge, t):
        """Canonical boundary point: t snapped to vertices within eps."""
        edge %= self.m
        elen = self.edge_vector(edge).norm()
        snap = self.eps_len()
        if t * elen <= snap:
            return BoundaryPoint(self.vertices[edge], edge, 0.0)
        if (1.0 - t) * elen <= snap:
            edge1 = (edge + 1) % self.m
            return BoundaryPoint(self.vertices[edge1], edge1, 0.0)
        return BoundaryPoint(self.point_at(edge, t), edge, t)

    def boundary_point_at_s(self, s):
        s = s % self.m
        edge = int(math.floor(s))
        if edge == self.m:
            edge = 0
        return self.boundary_point(edge, s - edge)

    # -- membership

    def clearance(self, p):
        """Inward signed distance to the boundary (negative outside)."""
        return float(kernels.clearance(self.xs, self.ys, p.x, p.y))

    def contains_interior(self, p, tol=None):
        if tol is None:
            tol = self.eps_len()
        return self.clearance(p) > tol

    def require_interior(self, p):
        """Precondition check used by the metric operations; the shell of
        width EPS_BOUNDARY*diam counts as boundary."""
        if not p.is_finite():
            raise PointNotInterior(f"non-finite point {p}")
        if self.clearance(p) <= self.boundary_eps_len():
            raise PointNotInterior(f"{p} is not strictly inside the polygon")

    # -- cyclic boundary arithmetic

    def ccw_dist(self, s_from, s_to):
        """Length (in boundary coordinate units) of the CCW interval from
        s_from to s_to; empty (0) when they coincide."""
        return (s_to - s_from) % self.m

    def arc_vertex_count(self, s_from, s_to):
        """Number of polygon vertices strictly inside the open CCW arc."""
        d = self.ccw_dist(s_from, s_to)
        if d <= 0.0:
            return 0
        first = math.floor(s_from) + 1.0
        last = math.ceil(s_from + d) - 1.0
        return max(0, int(last - first) + 1)

    def arc_median_vertex(self, s_from, s_to):
        """Index of the middle vertex of the open CCW arc (None if empty)."""
        d = self.ccw_dist(s_from, s_to)
        if d <= 0.0:
            return None
        first = math.floor(s_from) + 1.0
        last = math.ceil(s_from + d) - 1.0
        count = int(last - first) + 1
        if count <= 0:
            return None
        return int(first + count // 2) % self.m

    def __repr__(self):
        return f"ConvexPolygon(m={self.m}, diam={self.diam:.3g})"


def make_polygon(points):
    """Validate and build the convex domain.

    Accepts CW input (reversed to CCW). Rejects polygons with fewer than
    three vertices, duplicate vertices, or any non-left turn (collinear
    triples included) at the normalized tolerance.
    """
    pts = [p if isinstance(p, Point2) else Point2(float(p[0]), float(p[1])) for p in points]
    if len(pts) < 3:
        raise FewerThanThreeVertices(f"got {len(pts)} vertices")
    for p in pts:
        if not p.is_finite():
            raise NotStrictlyConvex(f"non-finite vertex {p}")
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    diam = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    if diam <= 0.0:
        raise DuplicateVertex("all vertices coincide")
    eps = tolerances.eps_geom() * diam
    m = len(pts)
    for i in range(m):
        for j in range(i + 1, m):
            if (pts[i] - pts[j]).norm() <= eps:
                raise DuplicateVertex(f"vertices {i} and {j} coincide")
    area2 = sum(pts[i].cross(pts[(i + 1) % m]) for i in range(m))
    if area2 < 0.0:
        pts.reverse()
    for i in range(m):
        a, b, c = pts[i], pts[(i + 1) % m], pts[(i + 2) % m]
        u, v = b - a, c - b
        if u.cross(v) <= tolerances.eps_geom() * u.norm() * v.norm():
            raise NotStrictlyConvex(
                f"vertices {i},{i + 1},{i + 2} do not make a strict left turn"
            )
    return ConvexPolygon(pts)


def regular_polygon(m, center=Point2(0.0, 0.0), radius=1.0):
    """Regular m-gon, first vertex at angle 0."""
    pts = [
        Point2(
            center.x + radius * math.cos(2.0 * math.pi * k / m),
            center.y + radius * math.sin(2.0 * math.pi * k / m),
        )
        for k in range(m)
    ]
    return make_polygon(pts)


def contains_interior(poly, p, tol=None):
    """True iff p is strictly inside, at tolerance eps_geom by default."""
    return poly.contains_interior(p, tol)


def chord_through(poly, p, direction):
    """The chord through interior point p with the given direction.

    Endpoint ``b`` lies in direction +dir from p, ``a`` in -dir. Runs in
    O(log m) boundary probes; endpoints passing within eps of a vertex are
    snapped to it.
    """
    poly.require_interior(p)
    d = direction if isinstance(direction, Point2) else Point2(*direction)
    n = d.norm()
    if n == 0.0:
        raise ValueError("direction must be nonzero")
    dx, dy = d.x / n, d.y / n
    snap = poly.eps_len()
    eb, tb, bx, by, _ = kernels.ray_exit(poly.xs, poly.ys, p.x, p.y, dx, dy, snap)
    ea, ta, ax, ay, _ = kernels.ray_exit(poly.xs, poly.ys, p.x, p.y, -dx, -dy, snap)
    a = BoundaryPoint(Point2(ax, ay), int(ea), float(ta))
    b = BoundaryPoint(Point2(bx, by), int(eb), float(tb))
    return Chord(a, b)


def boundary_exit(poly, p, direction):
    """Boundary point hit by the ray from interior p along direction."""
    d = direction if isinstance(direction, Point2) else Point2(*direction)
    n = d.norm()
    if n == 0.0:
        raise ValueError("direction must be nonzero")
    e, t, hx, hy, _ = kernels.ray_exit(
        poly.xs, poly.ys, p.x, p.y, d.x / n, d.y / n, poly.eps_len()
    )
    return BoundaryPoint(Point2(hx, hy), int(e), float(t))


def spokes(poly, p):
    """The m chords through p and each polygon vertex, indexed by vertex;
    each chord's b endpoint is the vertex itself."""
    poly.require_interior(p)
    out = []
    for i in range(poly.m):
        v = poly.vertices[i]
        ch = chord_through(poly, p, v - p)
        # the +dir endpoint must be the vertex itself
        if (ch.b.point - v).norm() > 4.0 * poly.eps_len():
            ch = Chord(ch.a, BoundaryPoint(v, i, 0.0))
        out.append(ch)
    return out


def supporting_lines_at(poly, x):
    """Supporting line(s) at a boundary point: the edge's line in the
    interior of an edge, the two incident edge lines at a vertex."""
    if x.t != 0.0:
        d = poly.edge_vector(x.edge).unit()
        return [SupportingLine(x, d)]
    prev_edge = (x.edge - 1) % poly.m
    return [
        SupportingLine(x, poly.edge_vector(prev_edge).unit()),
        SupportingLine(x, poly.edge_vector(x.edge).unit()),
    ]


# -- homogeneous line utilities shared by the bisector machinery


def line_through(p, q):
    """Line through two points as (a, b, c), a*x + b*y + c = 0, |(a,b)| = 1."""
    a = q.y - p.y
    b = p.x - q.x
    n = math.hypot(a, b)
    if n == 0.0:
        raise ValueError("coincident points do not define a line")
    a /= n
    b /= n
    return (a, b, -(a * p.x + b * p.y))


def line_point_dir(p, d):
    """Line through p with direction d, unit-normal coefficients."""
    a = -d.y
    b = d.x
    n = math.hypot(a, b)
    if n == 0.0:
        raise ValueError("zero direction")
    a /= n
    b /= n
    return (a, b, -(a * p.x + b * p.y))


def meet(l1, l2):
    """Homogeneous intersection point of two lines (x, y, w); w ~ 0 means
    the lines are parallel and the point is at infinity along (x, y)."""
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    return (b1 * c2 - c1 * b2, c1 * a2 - a1 * c2, a1 * b2 - b1 * a2)


def concurrency_residual(l1, l2, l3, scale):
    """How far three unit-normal lines are from being concurrent.

    The residual is |det| of the coefficient matrix with the offsets
    measured in units of ``scale``; it vanishes both for a common point
    and for three parallel lines (meeting at infinity).
    """
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    a3, b3, c3 = l3
    c1 /= scale
    c2 /= scale
    c3 /= scale
    det = (
        a1 * (b2 * c3 - c2 * b3)
        - b1 * (a2 * c3 - c2 * a3)
        + c1 * (a2 * b3 - b2 * a3)
    )
    return abs(det)


def lines_concurrent(l1, l2, l3, scale, tol=None):
    if tol is None:
        tol = tolerances.eps_geom()
    return concurrency_residual(l1, l2, l3, scale) <= tol
