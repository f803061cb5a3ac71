"""Three-site circumscribing balls: existence, computation, the in-circle
predicate, and classification of the forbidden regions.

A triple admits a circumscribing ball iff the endpoints of the (p,q)- and
(p,r)-bisectors alternate around the boundary. The center is bracketed by
a binary search over the spokes of each site (probing rays with the
bisector ray-hit routine and classifying them early/late), after which the
two bisectors are simple conics in the bracketed sectors; their
intersection inside the wedges is the center.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels, tolerances
from .bisector import (
    bisector_endpoint,
    bisector_ray_intersection,
    conic_in_sector,
    probe_budget,
    _sector_conic_forms,
)
from .errors import DegenerateTriple, PointNotInterior, SearchDidNotConverge
from .metric import ball_at_infinity, hilbert_distance
from .polygon import BoundaryPoint, Point2, boundary_exit

COLLINEAR_AREA_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class Circumcircle:
    center: Point2
    radius: float
    witnesses: tuple


class AbsenceReason(enum.Enum):
    IN_OVERLAP_REGION = "in_overlap_region"
    IN_OUTER_REGION = "in_outer_region"
    COLLINEAR_SITES = "collinear_sites"


@dataclass(frozen=True, slots=True)
class CircumcircleAbsence:
    reason: AbsenceReason


class Region(enum.Enum):
    ADMITS_CIRCUMCIRCLE = "admits_circumcircle"
    IN_OVERLAP = "in_overlap"
    IN_OUTER = "in_outer"


def _require_triple(poly, p, q, r):
    for s in (p, q, r):
        poly.require_interior(s)
    eps = poly.eps_len()
    if (p - q).norm() <= eps or (q - r).norm() <= eps or (p - r).norm() <= eps:
        raise DegenerateTriple("coincident sites")


def _is_collinear(poly, p, q, r):
    area2 = abs((q - p).cross(r - p))
    return area2 / (poly.diam * poly.diam) < COLLINEAR_AREA_TOL


def _endpoints_alternate(poly, eps_pq, eps_pr):
    """True iff the four bisector endpoints interleave pq, pr, pq, pr in
    cyclic boundary order; None when two endpoints (nearly) coincide and
    the order is not decidable from positions alone."""
    pts = [
        (eps_pq[0], 0),
        (eps_pq[1], 0),
        (eps_pr[0], 1),
        (eps_pr[1], 1),
    ]
    tol = 1e3 * poly.eps_len()
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i][1] != pts[j][1] and (
                pts[i][0].point - pts[j][0].point
            ).norm() <= tol:
                return None
    items = sorted((bp.s, lab) for bp, lab in pts)
    labels = [lab for _, lab in items]
    return labels in ([0, 1, 0, 1], [1, 0, 1, 0])


def _bisectors_cross_sampled(poly, p, q, r, e_pq, k=96):
    """Definitional crossing test: walk the (p,q)-bisector between its
    endpoints and look for a sign change of d(p,.) - d(r,.). Used when
    endpoint positions tie and alternation is ambiguous. Samples cluster
    toward the curve ends (cosine spacing); the ends themselves are left
    out because distance comparisons degenerate on the boundary."""
    a0 = math.atan2(e_pq[0].point.y - p.y, e_pq[0].point.x - p.x)
    a1 = math.atan2(e_pq[1].point.y - p.y, e_pq[1].point.x - p.x)
    span = (a1 - a0) % (2.0 * math.pi)
    mid = a0 + 0.5 * span
    probe = bisector_ray_intersection(poly, p, q, Point2(math.cos(mid), math.sin(mid)))
    if probe is None:
        a0, span = a1, 2.0 * math.pi - span
    neg = pos = False
    for i in range(1, k):
        ang = a0 + span * 0.5 * (1.0 - math.cos(math.pi * i / k))
        hit = bisector_ray_intersection(poly, p, q, Point2(math.cos(ang), math.sin(ang)))
        if hit is None:
            continue
        g = hilbert_distance(poly, p, hit) - hilbert_distance(poly, r, hit)
        neg = neg or g < 0.0
        pos = pos or g > 0.0
        if neg and pos:
            return True
    return False


def circumcircle_exists(poly, p, q, r):
    """Existence test via endpoint alternation; O(log^2 m). Coincident
    endpoint positions (two bisectors meeting the boundary at one vertex)
    fall back to sampling the bisector for an equidistant point."""
    _require_triple(poly, p, q, r)
    if _is_collinear(poly, p, q, r):
        raise DegenerateTriple("collinear sites")
    e_pq = (bisector_endpoint(poly, p, q), bisector_endpoint(poly, q, p))
    e_pr = (bisector_endpoint(poly, p, r), bisector_endpoint(poly, r, p))
    alt = _endpoints_alternate(poly, e_pq, e_pr)
    if alt is None:
        return _bisectors_cross_sampled(poly, p, q, r, e_pq)
    return alt


def bisector_tangent_at_endpoint(poly, p, q, bp, other):
    """Inward direction of the bisector where it meets the boundary at bp.

    Only the direction at a polygon-vertex anchor actually matters for the
    limit ball; there it is sampled numerically: rays from p slightly
    rotated off the endpoint direction hit the bisector near bp, and the
    chord from bp to the hit approximates the tangent. ``other`` is the
    opposite bisector endpoint, fixing the rotation side.
    """
    if bp.t != 0.0:
        return poly.edge_vector(bp.edge).unit().rot90()
    d0 = bp.point - p
    a0 = math.atan2(d0.y, d0.x)
    d1 = other.point - p
    a1 = math.atan2(d1.y, d1.x)
    # rotate from the endpoint direction into the fan that meets the bisector
    delta = (a1 - a0) % (2.0 * math.pi)
    sign = 1.0 if delta <= math.pi else -1.0
    for step in (1e-5, 1e-4, 1e-3, 1e-2):
        ang = a0 + sign * step
        hit = bisector_ray_intersection(poly, p, q, Point2(math.cos(ang), math.sin(ang)))
        if hit is None:
            continue
        u = hit - bp.point
        if u.norm() <= poly.eps_len():
            continue
        u = u.unit()
        k = bp.edge
        e1 = (poly.vertex(k - 1) - poly.vertex(k)).unit()
        e2 = (poly.vertex(k + 1) - poly.vertex(k)).unit()
        den = e1.cross(e2)
        if u.cross(e2) / den > 0.0 and e1.cross(u) / den > 0.0:
            return u
    # fall back to the chord direction toward p, always strictly inward
    return (p - bp.point).unit()


def _limit_balls(poly, p, q):
    """The two limit balls anchored at the (p,q)-bisector endpoints: the one
    at the left endpoint passes through p and q approaching from the left
    side and vice versa."""
    left = bisector_endpoint(poly, p, q)
    right = bisector_endpoint(poly, q, p)
    u_left = bisector_tangent_at_endpoint(poly, p, q, left, right)
    u_right = bisector_tangent_at_endpoint(poly, p, q, right, left)
    return (
        ball_at_infinity(poly, left, u_left, p),
        ball_at_infinity(poly, right, u_right, p),
    )


def region_classify(poly, p, q, r):
    """Placement of r relative to the pair (p,q): strictly inside both
    limit balls (overlap region), strictly outside both (outer region), or
    admitting a circumscribing ball. Points on either ball boundary (within
    eps) belong to the pencil and admit."""
    _require_triple(poly, p, q, r)
    b1, b2 = _limit_balls(poly, p, q)
    eps = poly.eps_len()
    c1 = b1.signed_clearance(r)
    c2 = b2.signed_clearance(r)
    if c1 > eps and c2 > eps:
        return Region.IN_OVERLAP
    if c1 < -eps and c2 < -eps:
        return Region.IN_OUTER
    return Region.ADMITS_CIRCUMCIRCLE


# -- center bracketing -------------------------------------------------------


def _ccw_angle(u, v):
    return (math.atan2(v.y, v.x) - math.atan2(u.y, u.x)) % (2.0 * math.pi)


class _SpokeBracket:
    """Binary search around pivot ``a`` for the pair of consecutive spokes
    bracketing the equidistant center; b is the CCW-next and c the CCW-prev
    triangle vertex."""

    def __init__(self, poly, a, b, c, stats=None):
        self.poly = poly
        self.a, self.b, self.c = a, b, c
        self.stats = stats
        self.v_minus = bisector_endpoint(poly, b, a)  # right of a->b
        self.v_plus = bisector_endpoint(poly, a, c)  # left of a->c
        self.vm_op = boundary_exit(poly, a, a - self.v_minus.point)
        self.vp_op = boundary_exit(poly, a, a - self.v_plus.point)
        # boundary arcs on the far side of each bisector, for ray
        # classification when the ray-hit search reports no intersection
        self.arc_b = self._far_arc(b)
        self.arc_c = self._far_arc(c)
        self.probes = 0

    def _far_arc(self, s):
        lo = bisector_endpoint(self.poly, self.a, s)
        hi = bisector_endpoint(self.poly, s, self.a)
        shadow = boundary_exit(self.poly, s, s - self.a)
        if self._in_arc(lo.s, hi.s, shadow.s):
            return (lo.s, hi.s)
        return (hi.s, lo.s)

    def _in_arc(self, s_from, s_to, s):
        poly = self.poly
        return poly.ccw_dist(s_from, s) <= poly.ccw_dist(s_from, s_to)

    def _classify(self, w):
        """early (True) if the ray from a along w meets the (a,b)-bisector
        first, late (False) if the (a,c)-bisector comes first."""
        poly, a = self.poly, self.a
        hit_b = bisector_ray_intersection(poly, a, self.b, w)
        hit_c = bisector_ray_intersection(poly, a, self.c, w)
        if hit_b is not None and hit_c is not None:
            return (hit_b - a).norm() <= (hit_c - a).norm()
        if hit_b is not None:
            return True
        if hit_c is not None:
            return False
        e = boundary_exit(poly, a, w)
        if self._in_arc(self.arc_b[0], self.arc_b[1], e.s):
            return True
        return False

    def run(self):
        poly, a = self.poly, self.a
        budget = probe_budget(poly.m)
        while True:
            n1 = poly.arc_vertex_count(self.v_minus.s, self.v_plus.s)
            use_op = _ccw_angle(self.v_minus.point - a, self.v_plus.point - a) < math.pi
            n2 = poly.arc_vertex_count(self.vm_op.s, self.vp_op.s) if use_op else 0
            if n1 == 0 and n2 == 0:
                break
            if self.probes >= budget:
                raise SearchDidNotConverge(
                    f"circumcenter bracketing exceeded {budget} probes"
                )
            self.probes += 1
            if n1 >= n2:
                v = poly.arc_median_vertex(self.v_minus.s, self.v_plus.s)
                w = (poly.vertices[v] - a).unit()
                fwd = BoundaryPoint(poly.vertices[v], v, 0.0)
                bwd = boundary_exit(poly, a, a - poly.vertices[v])
            else:
                v = poly.arc_median_vertex(self.vm_op.s, self.vp_op.s)
                w = (a - poly.vertices[v]).unit()
                bwd = BoundaryPoint(poly.vertices[v], v, 0.0)
                fwd = boundary_exit(poly, a, w)
            if self._classify(w):
                self.v_minus, self.vm_op = fwd, bwd
            else:
                self.v_plus, self.vp_op = fwd, bwd
        if self.stats is not None:
            self.stats["probes"] = self.stats.get("probes", 0) + self.probes
        fwd_edge = int(math.floor(self.v_minus.s)) % poly.m
        bwd_edge = int(math.floor(self.vm_op.s)) % poly.m
        return fwd_edge, bwd_edge

    def contains_dir(self, x, pad=1e-9):
        """Is x within the (final) angular wedge at the pivot."""
        u = self.v_minus.point - self.a
        v = self.v_plus.point - self.a
        w = x - self.a
        full = _ccw_angle(u, v)
        ang = _ccw_angle(u, w)
        return ang <= full + pad or ang >= 2.0 * math.pi - pad


# -- conic intersection ------------------------------------------------------


def _conic_matrix(coeffs):
    a, b, c, d, e, f = coeffs
    return np.array(
        [
            [a, b / 2.0, d / 2.0],
            [b / 2.0, c, e / 2.0],
            [d / 2.0, e / 2.0, f],
        ]
    )


def _split_degenerate(m3, tol=1e-10):
    """Split a degenerate conic matrix into two lines (Richter-Gebert).
    Returns a list of line coefficient triples."""
    # adjugate via cofactors (the matrix is singular)
    c = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            minor = np.delete(np.delete(m3, i, axis=0), j, axis=1)
            c[i, j] = ((-1) ** (i + j)) * np.linalg.det(minor)
    adj = c.T
    diag = np.diag(adj)
    i = int(np.argmax(np.abs(diag)))
    scale = float(np.max(np.abs(m3)))
    if scale == 0.0:
        return []
    if abs(diag[i]) <= tol * scale * scale:
        # rank one: a double line, the largest row
        k = int(np.argmax(np.abs(m3).sum(axis=1)))
        return [tuple(m3[k, :])]
    if diag[i] > 0.0:
        return []  # complex line pair
    beta = math.sqrt(-diag[i])
    pvec = adj[:, i] / beta
    skew = np.array(
        [
            [0.0, pvec[2], -pvec[1]],
            [-pvec[2], 0.0, pvec[0]],
            [pvec[1], -pvec[0], 0.0],
        ]
    )
    cmat = m3 + skew
    idx = np.unravel_index(np.argmax(np.abs(cmat)), cmat.shape)
    g = tuple(cmat[idx[0], :])
    h = tuple(cmat[:, idx[1]])
    return [g, h]


def _line_conic_points(line, m3):
    a, b, c = line
    n2 = a * a + b * b
    if n2 <= 1e-300:
        return []
    base = np.array([-a * c / n2, -b * c / n2, 1.0])
    direc = np.array([-b, a, 0.0])
    qa = direc @ m3 @ direc
    qb = 2.0 * (base @ m3 @ direc)
    qc = base @ m3 @ base
    pts = []
    if abs(qa) < 1e-300:
        if abs(qb) > 1e-300:
            pts.append(base + (-qc / qb) * direc)
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0.0:
            rt = math.sqrt(disc)
            for sgn in (1.0, -1.0):
                t = (-qb + sgn * rt) / (2.0 * qa)
                pts.append(base + t * direc)
    out = []
    for v in pts:
        if abs(v[2]) > 1e-12:
            out.append(Point2(float(v[0] / v[2]), float(v[1] / v[2])))
    return out


def intersect_conics(c1, c2):
    """Up to four real intersection points of two conics, via degenerate
    members of the pencil split into line pairs.

    The cubic det(m1 + t m2) is often ill-conditioned here (sector conics
    frequently degenerate to near-line-pairs), so candidate members are
    gathered generously: real parts of all cubic roots with a loose
    imaginary tolerance, plus m1 and m2 themselves when nearly singular.
    Split lines are intersected with both conics; spurious candidates are
    filtered by the caller's residual checks.
    """
    m1 = _conic_matrix(c1)
    m2 = _conic_matrix(c2)
    ts = np.array([0.0, 1.0, -1.0, 2.0])
    vals = [np.linalg.det(m1 + t * m2) for t in ts]
    coeffs = np.polyfit(ts, vals, 3)
    members = []
    if np.max(np.abs(coeffs)) > 0.0:
        for rt in np.roots(coeffs):
            if abs(rt.imag) <= 1e-5 * (1.0 + abs(rt.real)) and abs(rt.real) < 1e12:
                members.append(m1 + rt.real * m2)
    if abs(np.linalg.det(m1)) < 1e-10:
        members.append(m1)
    if abs(np.linalg.det(m2)) < 1e-10:
        members.append(m2)
    pts = []
    for m in members:
        for line in _split_degenerate(m):
            pts.extend(_line_conic_points(line, m1))
            pts.extend(_line_conic_points(line, m2))
    out = []
    for p in pts:
        if all((p - q).norm() > 1e-12 for q in out):
            out.append(p)
    return out


def circumcircle(poly, p, q, r, stats=None):
    """The circumscribing ball of three sites, or the reason none exists.

    Collinear triples report absence; coincident sites are rejected. The
    O(log^3 m) search brackets the center between consecutive spokes of
    each site, then intersects the two sector conics.
    """
    _require_triple(poly, p, q, r)
    witnesses = (p, q, r)
    if _is_collinear(poly, p, q, r):
        return CircumcircleAbsence(AbsenceReason.COLLINEAR_SITES)
    if (q - p).cross(r - p) < 0.0:
        q, r = r, q
    e_pq = (bisector_endpoint(poly, p, q), bisector_endpoint(poly, q, p))
    e_pr = (bisector_endpoint(poly, p, r), bisector_endpoint(poly, r, p))
    alt = _endpoints_alternate(poly, e_pq, e_pr)
    if alt is None:
        alt = _bisectors_cross_sampled(poly, p, q, r, e_pq)
    if not alt:
        region = region_classify(poly, p, q, r)
        if region == Region.IN_OVERLAP:
            return CircumcircleAbsence(AbsenceReason.IN_OVERLAP_REGION)
        return CircumcircleAbsence(AbsenceReason.IN_OUTER_REGION)
    br_p = _SpokeBracket(poly, p, q, r, stats)
    br_q = _SpokeBracket(poly, q, r, p, stats)
    br_r = _SpokeBracket(poly, r, p, q, stats)
    pf, pb = br_p.run()
    qf, qb = br_q.run()
    rf, rb = br_r.run()
    conic_pq = _sector_conic_forms(poly, p, q, pb, pf, qb, qf)
    conic_pr = _sector_conic_forms(poly, p, r, pb, pf, rb, rf)

    def norm6(cs):
        s = max(abs(v) for v in cs)
        return cs if s == 0.0 else tuple(v / s for v in cs)

    cands = intersect_conics(norm6(conic_pq), norm6(conic_pr))
    best = None
    for c in cands:
        if poly.clearance(c) <= poly.boundary_eps_len():
            continue
        d1 = hilbert_distance(poly, c, p)
        d2 = hilbert_distance(poly, c, q)
        d3 = hilbert_distance(poly, c, r)
        resid = max(abs(d1 - d2), abs(d2 - d3), abs(d1 - d3))
        in_wedges = (
            br_p.contains_dir(c) and br_q.contains_dir(c) and br_r.contains_dir(c)
        )
        key = (not in_wedges, resid)
        if best is None or key < best[0]:
            best = (key, c, (d1 + d2 + d3) / 3.0)
    if best is None or best[0][1] > 1e-6:
        # near-degenerate configurations can pass the ordering test without
        # an actual crossing; re-check definitionally before giving up
        if not _bisectors_cross_sampled(poly, p, q, r, e_pq):
            region = region_classify(poly, p, q, r)
            if region == Region.IN_OVERLAP:
                return CircumcircleAbsence(AbsenceReason.IN_OVERLAP_REGION)
            return CircumcircleAbsence(AbsenceReason.IN_OUTER_REGION)
        if best is None:
            raise SearchDidNotConverge("no real conic intersection in the wedge")
        raise SearchDidNotConverge(
            f"conic intersection residual {best[0][1]:.3g} too large"
        )
    (_, resid), center, radius = best
    return Circumcircle(center, radius, witnesses)


def in_circle(poly, circ, s):
    """Strict interior test of s against a circumscribing ball; O(log m)."""
    poly.require_interior(s)
    return hilbert_distance(poly, s, circ.center) < circ.radius - tolerances.eps_dist()