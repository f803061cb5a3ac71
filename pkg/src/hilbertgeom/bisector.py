"""Queries on the (p,q)-bisector: the curve of points Hilbert-equidistant
from two interior sites.

An interior point x is on the bisector iff three lines are concurrent: the
line through p and q, the line through the chord endpoints behind p and q
(seen from x), and the line through the endpoints beyond x. The bisector
meets the boundary in exactly two points, one on each side of the directed
line p -> q; within a fixed pair of sectors (boundary edges hit by the
chords from p and from q) the curve is a conic, obtained by equating the
two cross-ratio expressions written with edge-line functionals and
clearing logarithms: K1 * l1(z) g2(z) - K2 * g1(z) l2(z) = 0, a difference
of products of affine forms.

Both searches (ray hit, endpoints) are simulated binary searches over
spoke crossings with an O(log m) chord probe each, capped by a probe
budget; they finish with the closed-form conic restricted to the final
bracket.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import kernels, tolerances
from .errors import CoincidentSites, SearchDidNotConverge
from .polygon import (
    BoundaryPoint,
    Point2,
    boundary_exit,
    chord_through,
    concurrency_residual,
    line_point_dir,
    line_through,
    supporting_lines_at,
)

#: set by tests to enable per-probe consistency assertions
DEBUG_CHECKS = False


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True, slots=True)
class BisectorEndpoint:
    point: BoundaryPoint
    side: Side


@dataclass(frozen=True, slots=True)
class SectorConic:
    """Conic A x^2 + B xy + C y^2 + D x + E y + F = 0 describing the
    bisector within one sector; coefficients scaled to unit max-abs."""

    coefficients: tuple
    sector: tuple  # edge indices: (p-backward, p-forward, q-backward, q-forward)

    def evaluate(self, pt):
        a, b, c, d, e, f = self.coefficients
        return a * pt.x * pt.x + b * pt.x * pt.y + c * pt.y * pt.y + d * pt.x + e * pt.y + f

    def is_line(self, tol=1e-9):
        a, b, c, _, _, _ = self.coefficients
        return max(abs(a), abs(b), abs(c)) <= tol


def probe_budget(m):
    return 4 * math.ceil(math.log2(max(m, 2))) + 16


def _require_pair(poly, p, q):
    poly.require_interior(p)
    poly.require_interior(q)
    if (p - q).norm() <= poly.eps_len():
        raise CoincidentSites(f"sites {p} and {q} coincide")


def _dist(poly, a, b):
    return kernels.hilbert_distance_raw(
        poly.xs, poly.ys, a.x, a.y, b.x, b.y, poly.eps_len(), poly.eps_len()
    )


def is_on_bisector(poly, p, q, x):
    """Concurrency test of the three characteristic lines at x."""
    _require_pair(poly, p, q)
    poly.require_interior(x)
    eps = poly.eps_len()
    if (x - p).norm() <= eps or (x - q).norm() <= eps:
        return False
    if abs((q - p).unit().cross(x - p)) <= eps:
        # x on the line through the sites: all three characteristic lines
        # coincide and the concurrency test is vacuous; compare distances.
        return abs(_dist(poly, p, x) - _dist(poly, q, x)) <= tolerances.eps_dist()
    ch_p = chord_through(poly, p, x - p)
    ch_q = chord_through(poly, q, x - q)
    pp, p2 = ch_p.a.point, ch_p.b.point
    qp, q2 = ch_q.a.point, ch_q.b.point
    if (pp - qp).norm() <= eps or (p2 - q2).norm() <= eps:
        return abs(_dist(poly, p, x) - _dist(poly, q, x)) <= tolerances.eps_dist()
    l_pq = line_through(p, q)
    l_near = line_through(pp, qp)
    l_far = line_through(p2, q2)
    res = concurrency_residual(l_pq, l_near, l_far, poly.diam)
    return res <= tolerances.eps_geom()


def endpoint_residual(poly, p, q, bp):
    """Concurrency residual of a claimed bisector endpoint on the boundary:
    some supporting line at bp must be concurrent with the line through the
    sites and the line through the far chord endpoints.

    On an edge the supporting line is unique. At a vertex the whole pencil
    between the incident edge lines supports, so the relevant line is the
    join of bp with the intersection of the other two; the residual is zero
    when that join lies inside the pencil, otherwise the closer edge line's
    concurrency defect.
    """
    p1 = boundary_exit(poly, p, p - bp.point).point
    q1 = boundary_exit(poly, q, q - bp.point).point
    l_pq = line_through(p, q)
    if (p1 - q1).norm() <= poly.eps_len():
        l_far = line_point_dir(p1, (p1 - bp.point).unit())
    else:
        l_far = line_through(p1, q1)
    if bp.t != 0.0:
        sl = supporting_lines_at(poly, bp)[0]
        l_sup = line_point_dir(sl.anchor.point, sl.direction)
        return concurrency_residual(l_pq, l_far, l_sup, poly.diam)
    # vertex: test whether the forced join supports the polygon there
    zp = _meet_h(l_pq, l_far)
    x_h = (bp.point.x, bp.point.y, 1.0)
    join = _cross3(x_h, zp)
    jn = math.hypot(join[0], join[1])
    if jn > 1e-300:
        d = Point2(join[1], -join[0])  # direction of the join line
        k = bp.edge
        e1 = (poly.vertex(k - 1) - poly.vertex(k)).unit()
        e2 = (poly.vertex(k + 1) - poly.vertex(k)).unit()
        c1 = d.cross(e1)
        c2 = d.cross(e2)
        if c1 * c2 >= 0.0:
            return 0.0
    best = math.inf
    for sl in supporting_lines_at(poly, bp):
        l_sup = line_point_dir(sl.anchor.point, sl.direction)
        best = min(best, concurrency_residual(l_pq, l_far, l_sup, poly.diam))
    return best


# -- cross-ratio via edge-line functionals ---------------------------------


def _edge_form(poly, e):
    a, b, c = poly.edge_line(e)
    return (a, b, c)


def _form_at(form, pt):
    a, b, c = form
    return a * pt.x + b * pt.y + c


def _sector_conic_forms(poly, p, q, l1e, l2e, g1e, g2e):
    """Conic coefficients for equidistance with fixed chord edges: l1/l2 are
    the edges behind p / beyond x, g1/g2 behind q / beyond x."""
    l1 = _edge_form(poly, l1e)
    l2 = _edge_form(poly, l2e)
    g1 = _edge_form(poly, g1e)
    g2 = _edge_form(poly, g2e)
    k1 = _form_at(l2, p) * _form_at(g1, q)
    k2 = _form_at(g2, q) * _form_at(l1, p)

    def quad(u, v, k):
        (a1, b1, c1), (a2, b2, c2) = u, v
        return (
            k * a1 * a2,
            k * (a1 * b2 + b1 * a2),
            k * b1 * b2,
            k * (a1 * c2 + c1 * a2),
            k * (b1 * c2 + c1 * b2),
            k * c1 * c2,
        )

    qa = quad(l1, g2, k1)
    qb = quad(g1, l2, k2)
    return tuple(x - y for x, y in zip(qa, qb))


def conic_in_sector(poly, p, q, x):
    """The bisector's conic in the sector containing x (the four boundary
    edges hit by the chords from p and q through x); x need not lie on the
    bisector itself."""
    _require_pair(poly, p, q)
    poly.require_interior(x)
    ch_p = chord_through(poly, p, x - p)
    ch_q = chord_through(poly, q, x - q)
    coeffs = _sector_conic_forms(
        poly, p, q, ch_p.a.edge, ch_p.b.edge, ch_q.a.edge, ch_q.b.edge
    )
    scale = max(abs(c) for c in coeffs)
    if scale == 0.0:
        scale = 1.0
    return SectorConic(
        tuple(c / scale for c in coeffs),
        (ch_p.a.edge, ch_p.b.edge, ch_q.a.edge, ch_q.b.edge),
    )


# -- ray / bisector intersection --------------------------------------------


def _collinear_hit(poly, p, q, d, chord):
    """Bisector point on the ray when q lies on the ray's line: the Hilbert
    midpoint of the segment, in closed form along the shared chord."""
    if d.dot(q - p) <= 0.0:
        return None
    a_pt, b_pt = chord.a.point, chord.b.point
    u = (b_pt - a_pt).unit()
    length = (b_pt - a_pt).norm()
    sp = (p - a_pt).norm()
    sq = (q - a_pt).norm()
    omega = math.sqrt((sp * sq) / ((length - sp) * (length - sq)))
    s = length * omega / (1.0 + omega)
    return Point2(a_pt.x + s * u.x, a_pt.y + s * u.y)


def _quadratic_roots(a, b, c):
    if a == 0.0:
        if b == 0.0:
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    r = math.sqrt(disc)
    # numerically stable split
    qq = -0.5 * (b + math.copysign(r, b))
    roots = []
    if qq != 0.0:
        roots.append(qq / a)
        roots.append(c / qq)
    else:
        roots.append(0.0)
    return roots


def bisector_ray_intersection(poly, p, q, direction, stats=None):
    """Point where the ray from p along ``direction`` meets the
    (p,q)-bisector, or None when the ray leaves the polygon first.

    Simulated binary search over the crossings of q's spokes with the ray's
    chord; the final bracket between consecutive spokes is solved in closed
    form (the sector conic restricted to the ray is a quadratic).
    """
    _require_pair(poly, p, q)
    d = direction if isinstance(direction, Point2) else Point2(*direction)
    d = d.unit()
    eps = poly.eps_len()
    ch = chord_through(poly, p, d)
    if abs(d.cross(q - p)) <= eps:
        return _collinear_hit(poly, p, q, d, ch)

    budget = probe_budget(poly.m)
    probes = 0
    t_hi = (ch.b.point - p).norm()
    t_lo = 0.0
    # boundary endpoints of the chords through q at the bracket ends
    f_lo = boundary_exit(poly, p, p - q)  # forward: beyond p as seen from q
    b_lo = boundary_exit(poly, q, q - p)
    f_hi = ch.b
    b_hi = boundary_exit(poly, q, q - ch.b.point)
    sense = (p - q).cross(ch.b.point - q)  # rotation sense of the sweep

    def arc_args(lo_s, hi_s):
        return (lo_s, hi_s) if sense > 0.0 else (hi_s, lo_s)

    while True:
        n_f = poly.arc_vertex_count(*arc_args(f_lo.s, f_hi.s))
        n_b = poly.arc_vertex_count(*arc_args(b_lo.s, b_hi.s))
        if n_f == 0 and n_b == 0:
            break
        if probes >= budget:
            raise SearchDidNotConverge(
                f"ray search exceeded {budget} probes (m={poly.m})"
            )
        probes += 1
        if n_f >= n_b:
            v = poly.arc_median_vertex(*arc_args(f_lo.s, f_hi.s))
        else:
            v = poly.arc_median_vertex(*arc_args(b_lo.s, b_hi.s))
        vp = poly.vertices[v]
        den = d.cross(vp - q)
        if den == 0.0:
            raise SearchDidNotConverge("spoke parallel to the probed ray")
        t = (q - p).cross(vp - q) / den
        x = Point2(p.x + t * d.x, p.y + t * d.y)
        opp = boundary_exit(poly, q, q - vp)
        if (x - q).dot(vp - q) > 0.0:
            fv, bv = BoundaryPoint(vp, v, 0.0), opp
        else:
            fv, bv = opp, BoundaryPoint(vp, v, 0.0)
        if t <= t_lo:
            t_probe_side = -1
        elif t >= t_hi:
            t_probe_side = 1
        else:
            f = _dist(poly, p, x) - _dist(poly, q, x)
            t_probe_side = -1 if f < 0.0 else 1
        if t_probe_side < 0:
            if t > t_lo:
                t_lo = t
            f_lo, b_lo = fv, bv
        else:
            if t < t_hi:
                t_hi = t
            f_hi, b_hi = fv, bv
    if stats is not None:
        stats["probes"] = stats.get("probes", 0) + probes
        stats["max_probes"] = max(stats.get("max_probes", 0), probes)

    # closed form on the final bracket: all four chord edges are fixed
    def arc_edge(lo_s, hi_s):
        a, b = arc_args(lo_s, hi_s)
        return int(math.floor(a)) % poly.m

    e_qf = arc_edge(f_lo.s, f_hi.s)
    e_qb = arc_edge(b_lo.s, b_hi.s)
    coeffs = _sector_conic_forms(poly, p, q, ch.a.edge, ch.b.edge, e_qb, e_qf)
    # restrict to z = p + t d
    a_t = b_t = c_t = 0.0
    ca, cb, cc, cd, ce, cf = coeffs
    # quadratic in t: substitute x = px + t dx, y = py + t dy
    a_t = ca * d.x * d.x + cb * d.x * d.y + cc * d.y * d.y
    b_t = (
        2.0 * ca * p.x * d.x
        + cb * (p.x * d.y + p.y * d.x)
        + 2.0 * cc * p.y * d.y
        + cd * d.x
        + ce * d.y
    )
    c_t = ca * p.x * p.x + cb * p.x * p.y + cc * p.y * p.y + cd * p.x + ce * p.y + cf
    pad = 16.0 * eps
    best = None
    for t in _quadratic_roots(a_t, b_t, c_t):
        if t_lo - pad <= t <= t_hi + pad:
            x = Point2(p.x + t * d.x, p.y + t * d.y)
            if poly.clearance(x) <= poly.boundary_eps_len():
                continue
            resid = abs(_dist(poly, p, x) - _dist(poly, q, x))
            if best is None or resid < best[0]:
                best = (resid, x)
    if best is None or best[0] > 1e-6 * max(1.0, abs(_dist(poly, p, q))):
        return None
    return best[1]


# -- bisector endpoints ------------------------------------------------------


def _cross3(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _det3(a, b, c):
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def _meet_h(l1, l2):
    return _cross3(l1, l2)


def _wrap_coord(t, t0, t1, scale):
    """Monotone position of a point of the site line in the travel order
    z0 -> -infinity ~ +infinity -> z1 (the portion outside the chord):
    0 at the backward chord end z0, 1/2 at infinity, 1 at the forward end."""
    if math.isnan(t):
        return 0.5
    if math.isinf(t):
        return 0.5
    if t <= t0:
        u = (t0 - t) / scale
        return 0.5 * u / (1.0 + u)
    if t >= t1:
        u = (t - t1) / scale
        return 1.0 - 0.5 * u / (1.0 + u)
    # numerically inside the chord: clamp to the nearer end
    return 0.0 if (t - t0) <= (t1 - t) else 1.0


def _t_of_hpoint(hpt, p, d):
    x, y, w = hpt
    if abs(w) <= 1e-14 * max(abs(x), abs(y), 1e-300):
        return math.inf
    return ((x / w) - p.x) * d.x + ((y / w) - p.y) * d.y


class _EndpointSearch:
    """State of the upper-chain binary search for one bisector endpoint."""

    def __init__(self, poly, p, q, stats=None):
        self.poly = poly
        self.p = p
        self.q = q
        self.stats = stats
        self.d = (q - p).unit()
        ch = chord_through(poly, p, self.d)
        self.z0, self.z1 = ch.a, ch.b
        self.t0 = -(p - self.z0.point).norm()
        self.t1 = (self.z1.point - p).norm()
        self.chord_len = self.t1 - self.t0
        self.l_pq = line_point_dir(p, self.d)
        # travel order runs from z0 to z1 along the upper chain (the side
        # left of p->q), i.e. clockwise in boundary coordinates
        self.lo = self.z0
        self.hi = self.z1
        self.pl_lo = self.z1
        self.pl_hi = self.z0
        self.ql_lo = self.z1
        self.ql_hi = self.z0
        self.probes = 0

    def _wrap(self, t):
        return _wrap_coord(t, self.t0, self.t1, self.chord_len)

    def _eval(self, xbp):
        """Classify a probe on the upper chain: -1 past the endpoint,
        +1 before it (travel more), 0 found. Returns (side, p', q')."""
        poly, p, q = self.poly, self.p, self.q
        pp = boundary_exit(poly, p, p - xbp.point)
        qp = boundary_exit(poly, q, q - xbp.point)
        eps = poly.eps_len()
        if (pp.point - qp.point).norm() <= 10.0 * eps:
            # probe nearly collinear with the sites; compare distances just
            # inside the boundary instead
            inward = (poly.centroid - xbp.point).unit()
            w = xbp.point + (1e-7 * poly.diam) * inward
            f = _dist(poly, p, w) - _dist(poly, q, w)
            return (1 if f < 0.0 else -1), pp, qp
        l_far = line_through(pp.point, qp.point)
        wzp = self._wrap(_t_of_hpoint(_meet_h(self.l_pq, l_far), p, self.d))
        wz = []
        for sl in supporting_lines_at(poly, xbp):
            l_sup = line_point_dir(sl.anchor.point, sl.direction)
            wz.append(self._wrap(_t_of_hpoint(_meet_h(self.l_pq, l_sup), p, self.d)))
        wmin, wmax = min(wz), max(wz)
        if wmin <= wzp <= wmax:
            return 0, pp, qp
        return (1 if wzp > wmax else -1), pp, qp

    # arcs of candidate vertices (open, in boundary CCW order)

    def _upper_arc(self):
        return (self.hi.s, self.lo.s)

    def _p_arc(self):
        return (self.pl_hi.s, self.pl_lo.s)

    def _q_arc(self):
        return (self.ql_hi.s, self.ql_lo.s)

    def run(self):
        poly = self.poly
        budget = probe_budget(poly.m)
        while True:
            n_up = poly.arc_vertex_count(*self._upper_arc())
            n_p = poly.arc_vertex_count(*self._p_arc())
            n_q = poly.arc_vertex_count(*self._q_arc())
            if n_up == 0 and n_p == 0 and n_q == 0:
                break
            if self.probes >= budget:
                raise SearchDidNotConverge(
                    f"endpoint search exceeded {budget} probes (m={poly.m})"
                )
            self.probes += 1
            if n_up >= n_p and n_up >= n_q:
                v = poly.arc_median_vertex(*self._upper_arc())
                xbp = BoundaryPoint(poly.vertices[v], v, 0.0)
            elif n_p >= n_q:
                v = poly.arc_median_vertex(*self._p_arc())
                xbp = boundary_exit(poly, self.p, self.p - poly.vertices[v])
            else:
                v = poly.arc_median_vertex(*self._q_arc())
                xbp = boundary_exit(poly, self.q, self.q - poly.vertices[v])
            side, pp, qp = self._eval(xbp)
            if side == 0:
                self._record()
                return xbp
            if side > 0:
                self.lo, self.pl_lo, self.ql_lo = xbp, pp, qp
            else:
                self.hi, self.pl_hi, self.ql_hi = xbp, pp, qp
        self._record()
        return self._solve_edge()

    def _record(self):
        if self.stats is not None:
            self.stats["probes"] = self.stats.get("probes", 0) + self.probes
            self.stats["max_probes"] = max(self.stats.get("max_probes", 0), self.probes)

    def _solve_edge(self):
        """Exact endpoint inside the final bracket: the supporting line,
        the p'-edge and the q'-edge are all fixed, so collinearity of z,
        p'(tau), q'(tau) is a quadratic in the edge parameter."""
        poly, p, q = self.poly, self.p, self.q
        # the bracket arc starts at hi.s and extends CCW to lo.s; with no
        # vertex strictly inside, its width is at most one edge, but it may
        # still cross the s = 0 seam when lo sits exactly on vertex 0
        s_hi, s_lo = self.hi.s, self.lo.s
        width = poly.ccw_dist(s_hi, s_lo)
        e_up = int(math.floor(s_hi)) % poly.m
        tau_lo = s_hi - math.floor(s_hi)
        tau_hi = min(tau_lo + width, 1.0)

        def arc_edge(arc):
            a, _ = arc
            return int(math.floor(a)) % poly.m

        e_p = arc_edge(self._p_arc())
        e_q = arc_edge(self._q_arc())
        v0 = poly.vertex(e_up)
        ev = poly.edge_vector(e_up)
        lu = poly.edge_line(e_up)
        lp3 = poly.edge_line(e_p)
        lq3 = poly.edge_line(e_q)
        zs = _meet_h(lu, self.l_pq)
        ph = (p.x, p.y, 1.0)
        qh = (q.x, q.y, 1.0)
        x0 = (v0.x, v0.y, 1.0)
        eh = (ev.x, ev.y, 0.0)
        pp0 = _cross3(_cross3(x0, ph), lp3)
        pp1 = _cross3(_cross3(eh, ph), lp3)
        qq0 = _cross3(_cross3(x0, qh), lq3)
        qq1 = _cross3(_cross3(eh, qh), lq3)
        a2 = _det3(zs, pp1, qq1)
        b1 = _det3(zs, pp0, qq1) + _det3(zs, pp1, qq0)
        c0 = _det3(zs, pp0, qq0)
        pad = 1e-9
        cands = [
            t for t in _quadratic_roots(a2, b1, c0) if tau_lo - pad <= t <= tau_hi + pad
        ]
        best = None
        for t in cands:
            bp = poly.boundary_point(e_up, min(1.0, max(0.0, t)))
            r = endpoint_residual(poly, p, q, bp)
            if best is None or r < best[0]:
                best = (r, bp)
        if best is not None and best[0] <= 1e-6:
            return best[1]
        return self._bisect_edge(e_up, tau_lo, tau_hi, best)

    def _bisect_edge(self, e_up, tau_lo, tau_hi, seed):
        """Sign bisection on the wrap-order comparison, used when the
        quadratic is ill-conditioned.

        Travel order decreases the edge parameter, so the +1 side (before
        the endpoint) sits at larger tau and the -1 side at smaller tau.
        """
        poly = self.poly

        def g(tau):
            bp = BoundaryPoint(poly.point_at(e_up, tau), e_up, tau)
            side, _, _ = self._eval(bp)
            return side

        a, b = tau_lo, tau_hi
        if g(a) >= 0:
            return poly.boundary_point(e_up, a)
        if g(b) <= 0:
            return poly.boundary_point(e_up, b)
        for _ in range(80):
            mid = 0.5 * (a + b)
            gm = g(mid)
            if gm == 0:
                return poly.boundary_point(e_up, mid)
            if gm > 0:
                b = mid
            else:
                a = mid
        bp = poly.boundary_point(e_up, 0.5 * (a + b))
        if seed is not None and seed[0] < endpoint_residual(poly, self.p, self.q, bp):
            return seed[1]
        return bp


def bisector_endpoint(poly, p, q, stats=None):
    """Endpoint of the (p,q)-bisector lying to the left of the directed
    line p -> q, as a boundary point. O(log^2 m)."""
    _require_pair(poly, p, q)
    return _EndpointSearch(poly, p, q, stats).run()


def bisector_endpoints(poly, p, q, stats=None):
    """Both bisector endpoints, labeled relative to the directed line
    p -> q; swapping the arguments swaps the labels."""
    left = bisector_endpoint(poly, p, q, stats)
    right = bisector_endpoint(poly, q, p, stats)
    return (
        BisectorEndpoint(left, Side.LEFT),
        BisectorEndpoint(right, Side.RIGHT),
    )
