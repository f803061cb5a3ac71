"""Hilbert distance, metric balls, and limit balls anchored on the boundary.

The distance between interior points p, q is half the log of the cross
ratio of (q, p; p', q') where p', q' are the chord endpoints through the
pair, ordered <p', p, q, q'>. Balls are explicit convex polygons: two
boundary points per spoke (the chords through the center and each polygon
vertex), inverted from the distance in closed form along each spoke.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels, tolerances
from .errors import (
    DirectionNotInward,
    EmptySiteSet,
    NonpositiveRadius,
    PointNotInterior,
)
from .polygon import (
    BoundaryPoint,
    Point2,
    boundary_exit,
    chord_through,
    line_point_dir,
    line_through,
)


def _membership_arrays(points):
    """Vertex arrays for clearance tests with coincident neighbors dropped
    (coincident spokes duplicate ball vertices; zero-length edges would
    break the signed-distance kernel)."""
    span = max(
        max(v.x for v in points) - min(v.x for v in points),
        max(v.y for v in points) - min(v.y for v in points),
    )
    tol = 1e-14 * max(span, 1e-300)
    kept = []
    for v in points:
        if not kept or (v - kept[-1]).norm() > tol:
            kept.append(v)
    if len(kept) > 1 and (kept[0] - kept[-1]).norm() <= tol:
        kept.pop()
    return np.array([v.x for v in kept]), np.array([v.y for v in kept])


class HilbertBall:
    """Metric ball as an explicit 2m-gon.

    ``boundary[i]`` and ``boundary[i + m]`` lie on the same spoke of the
    center, on opposite sides of it.
    """

    def __init__(self, center, radius, boundary):
        self.center = center
        self.radius = radius
        self.boundary = tuple(boundary)
        self._bxs, self._bys = _membership_arrays(self.boundary)

    def signed_clearance(self, p):
        """Inward distance of p to the ball boundary; > 0 strictly inside."""
        return float(kernels.signed_clearance_convex(self._bxs, self._bys, p.x, p.y))

    def contains(self, p, tol=0.0):
        return self.signed_clearance(p) > tol

    def __repr__(self):
        return f"HilbertBall(center={self.center}, radius={self.radius:.6g})"


class BallAtInfinity:
    """Limit of balls whose centers approach a boundary anchor along an
    inward direction while passing through a fixed interior point."""

    def __init__(self, anchor, direction, through, boundary):
        self.anchor = anchor
        self.direction = direction
        self.through = through
        self.boundary = tuple(boundary)
        self._bxs, self._bys = _membership_arrays(self.boundary)

    def signed_clearance(self, p):
        return float(kernels.signed_clearance_convex(self._bxs, self._bys, p.x, p.y))

    def contains(self, p, tol=0.0):
        return self.signed_clearance(p) > tol

    def __repr__(self):
        return f"BallAtInfinity(anchor={self.anchor.point}, through={self.through})"


def hilbert_distance(poly, p, q):
    """Hilbert distance between interior points; 0 for coincident points
    (within eps), O(log m)."""
    poly.require_interior(p)
    poly.require_interior(q)
    return float(
        kernels.hilbert_distance_raw(
            poly.xs, poly.ys, p.x, p.y, q.x, q.y, poly.eps_len(), poly.eps_len()
        )
    )


def _ball_sort_key(center):
    def key(item):
        ang, forward, pt = item
        return (ang, forward)

    return key


def hilbert_ball(poly, p, rho):
    """The radius-rho ball around p as its 2m boundary points, CCW."""
    poly.require_interior(p)
    if not (rho > 0.0):
        raise NonpositiveRadius(f"radius must be positive, got {rho}")
    bx, by = kernels.ball_points_raw(poly.xs, poly.ys, p.x, p.y, rho, poly.eps_len())
    m = poly.m
    items = []
    for i in range(2 * m):
        ang = math.atan2(by[i] - p.y, bx[i] - p.x)
        # opposite-side points sort first on exact angular ties so that the
        # i / i+m same-spoke pairing survives coincident spokes
        items.append((ang, 1 if i < m else 0, Point2(float(bx[i]), float(by[i]))))
    items.sort(key=_ball_sort_key(p))
    return HilbertBall(p, rho, [it[2] for it in items])


def _incident_edge_dirs(poly, x):
    """Directions of the two edges at vertex x, both oriented away from it."""
    k = x.edge
    e_prev = (poly.vertex(k - 1) - poly.vertex(k)).unit()
    e_next = (poly.vertex(k + 1) - poly.vertex(k)).unit()
    return e_prev, e_next


def _limit_supporting_dir(poly, x, u):
    """Direction of the supporting line the limit construction uses at x.

    Edge-interior anchors have a unique supporting line. At a vertex the
    line is fixed by the inward direction u: writing u = a*e1 + b*e2 in
    the basis of the away-oriented incident edge directions, the limit
    line has direction a*e1 - b*e2.
    """
    if x.t != 0.0:
        return poly.edge_vector(x.edge).unit()
    e1, e2 = _incident_edge_dirs(poly, x)
    den = e1.cross(e2)
    a = u.cross(e2) / den
    b = e1.cross(u) / den
    if a <= 0.0 or b <= 0.0:
        raise DirectionNotInward(f"{u} does not point into the interior at {x.point}")
    return (a * e1 - b * e2).unit()


def _require_inward(poly, x, u):
    if u.norm() == 0.0:
        raise DirectionNotInward("zero direction")
    if x.t != 0.0:
        n = poly.edge_vector(x.edge).unit().rot90()
        if u.dot(n) <= 0.0:
            raise DirectionNotInward(f"{u} does not point inward on edge {x.edge}")
    else:
        e1, e2 = _incident_edge_dirs(poly, x)
        den = e1.cross(e2)
        if u.cross(e2) / den <= 0.0 or e1.cross(u) / den <= 0.0:
            raise DirectionNotInward(f"{u} does not point into the vertex cone")


def _line_through_point_and_hpoint(p, hpt):
    """Line joining an affine point and a homogeneous point (handles the
    point at infinity uniformly)."""
    vx, vy, vw = hpt
    a = p.y * vw - vy
    b = vx - p.x * vw
    n = math.hypot(a, b)
    if n == 0.0:
        raise ValueError("degenerate join")
    return (a / n, b / n, (p.x * vy - p.y * vx) / n)


def _meet_h(l1, l2):
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    return (b1 * c2 - c1 * b2, c1 * a2 - a1 * c2, a1 * b2 - b1 * a2)


def _limit_point_on_chord(poly, x, p, pprime, ell, w):
    """Boundary point of the limit ball on the chord from x through w."""
    join = line_through(pprime, w)
    v = _meet_h(join, ell)
    line_pv = _line_through_point_and_hpoint(p, v)
    chord_line = line_through(x, w)
    qx, qy, qw = _meet_h(line_pv, chord_line)
    wx, wy = w.x - x.x, w.y - x.y
    wlen2 = wx * wx + wy * wy
    if abs(qw) < 1e-300:
        return None
    qx /= qw
    qy /= qw
    tau = ((qx - x.x) * wx + (qy - x.y) * wy) / wlen2
    tau = min(1.0, max(0.0, tau))
    return Point2(x.x + tau * wx, x.y + tau * wy)


def ball_at_infinity(poly, x, u, p):
    """Limit ball anchored at boundary point x along inward direction u,
    passing through interior point p.

    The boundary polygon has one vertex per chord from x through a polygon
    vertex, plus the anchor itself and p.
    """
    poly.require_interior(p)
    u = u.unit()
    _require_inward(poly, x, u)
    ldir = _limit_supporting_dir(poly, x, u)
    ell = line_point_dir(x.point, ldir)
    pprime = boundary_exit(poly, p, p - x.point).point
    eps = poly.eps_len()
    pts = [x.point, p]
    for w in poly.vertices:
        if (w - x.point).norm() <= eps or (w - pprime).norm() <= eps:
            continue
        q = _limit_point_on_chord(poly, x.point, p, pprime, ell, w)
        if q is not None:
            pts.append(q)
    # order CCW around the centroid; drop near-duplicates
    cx = sum(q.x for q in pts) / len(pts)
    cy = sum(q.y for q in pts) / len(pts)
    pts.sort(key=lambda q: math.atan2(q.y - cy, q.x - cx))
    dedup = []
    for q in pts:
        if not dedup or (q - dedup[-1]).norm() > eps:
            dedup.append(q)
    if len(dedup) > 1 and (dedup[0] - dedup[-1]).norm() <= eps:
        dedup.pop()
    return BallAtInfinity(x, u, p, dedup)


def min_empty_ball_at_infinity(poly, x, sites):
    """Site of P on the smallest empty limit ball anchored at x, with that
    ball.

    Projects every site onto a fixed reference chord through x: the balls
    anchored at x are nested, so the site whose projection lands closest
    to x wins. O(n log m).
    """
    if not sites:
        raise EmptySiteSet("need at least one site")
    for s in sites:
        poly.require_interior(s)
    if x.t != 0.0:
        u = poly.edge_vector(x.edge).unit().rot90()
    else:
        e1, e2 = _incident_edge_dirs(poly, x)
        u = (e1 + e2).unit()
    ldir = _limit_supporting_dir(poly, x, u)
    ell = line_point_dir(x.point, ldir)
    c = poly.centroid
    y = boundary_exit(poly, c, c - x.point)
    chord_line = line_through(x.point, y.point)
    chord_vec = y.point - x.point
    chord_len2 = chord_vec.dot(chord_vec)
    eps = poly.eps_len()
    best = None
    for idx, s in enumerate(sites):
        pprime = boundary_exit(poly, s, s - x.point).point
        if (pprime - y.point).norm() <= eps:
            q = s
        else:
            join = line_through(pprime, y.point)
            v = _meet_h(join, ell)
            line_pv = _line_through_point_and_hpoint(s, v)
            qx, qy, qw = _meet_h(line_pv, chord_line)
            if abs(qw) < 1e-300:
                continue
            qx /= qw
            qy /= qw
            tau = ((qx - x.point.x) * chord_vec.x + (qy - x.point.y) * chord_vec.y)
            tau = min(1.0, max(0.0, tau / chord_len2))
            q = Point2(x.point.x + tau * chord_vec.x, x.point.y + tau * chord_vec.y)
        key = (q - x.point).norm()
        if best is None or key < best[0]:
            best = (key, idx)
    if best is None:
        raise EmptySiteSet("no site projects onto the reference chord")
    winner = sites[best[1]]
    return winner, ball_at_infinity(poly, x, u, winner)
