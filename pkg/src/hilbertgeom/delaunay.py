"""Randomized incremental construction of the augmented Delaunay
triangulation under the polygon Hilbert metric.

The subdivision covers the whole domain: standard triangles (three sites),
teeth (a hull edge joined to its bisector endpoint on the boundary), and
gaps (one site, two boundary vertices, and a boundary chain). Teeth and
gaps alternate in a cyclic ring around the boundary; co-located boundary
vertices are kept distinct (each owned by one tooth) with zero-width gaps
between them.

Face vertex conventions, all counterclockwise:
  standard  (a, b, c)        three sites
  tooth     (a, b, x)        hull edge a->b, boundary vertex x left of it
  gap       (a, u, v)        site a, boundary arc running CCW from u to v

The ring successor of a tooth (a, b, x) is the gap (a, x, .); the ring
successor of a gap (a, u, v) is the tooth owning v, whose second site is a.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

from . import tolerances
from .bisector import bisector_endpoint, bisector_ray_intersection, endpoint_residual
from .circumcircle import (
    Circumcircle,
    CircumcircleAbsence,
    bisector_tangent_at_endpoint,
    circumcircle,
)
from .errors import (
    DuplicateSite,
    DuplicateSites,
    GeneralPositionViolation,
    InternalInvariantViolation,
    PointNotInterior,
    TooFewSites,
)
from .metric import ball_at_infinity, hilbert_distance
from .polygon import Point2

#: enables expensive per-insert consistency assertions
DEBUG_CHECKS = False


class FaceKind(enum.Enum):
    STANDARD = "standard"
    TOOTH = "tooth"
    GAP = "gap"


@dataclass(frozen=True, slots=True)
class SiteRef:
    index: int


@dataclass(frozen=True, slots=True)
class BoundaryRef:
    uid: int
    bp: object  # BoundaryPoint

    def __hash__(self):
        return hash(("b", self.uid))

    def __eq__(self, other):
        return isinstance(other, BoundaryRef) and other.uid == self.uid


class Face:
    __slots__ = (
        "id",
        "kind",
        "verts",
        "circ",
        "infball",
        "ring_prev",
        "ring_next",
        "bucket",
        "alive",
    )

    def __init__(self, fid, kind, verts):
        self.id = fid
        self.kind = kind
        self.verts = verts
        self.circ = None
        self.infball = None
        self.ring_prev = None
        self.ring_next = None
        self.bucket = []
        self.alive = True

    def __repr__(self):
        return f"Face({self.id}, {self.kind.value}, {self.verts})"


class _NeedsPerturbation(Exception):
    """Internal: an in-circle or overlap decision fell inside the ambiguity
    shell; the caller retries the insertion with a perturbed site."""


class AugmentedTriangulation:
    """Single-writer structure; after build() it is immutable in practice
    and safe for concurrent reads."""

    def __init__(self, poly, sites, site_order, seed=0):
        self.poly = poly
        self.sites = list(sites)  # insertion order
        self.site_order = list(site_order)  # original index per entry
        self.seed = seed
        self.n_inserted = 0
        self.faces = {}
        self.edge_face = {}
        self._fid = 0
        self._uid = 0
        self._site_face = {}
        self._log = None

    # -- geometry of refs

    def coord(self, ref):
        if isinstance(ref, SiteRef):
            return self.sites[ref.index]
        return ref.bp.point

    def _new_bref(self, bp):
        self._uid += 1
        return BoundaryRef(self._uid, bp)

    # -- face bookkeeping (journaled for perturbation rollback)

    def _face_edges(self, face):
        a, b, c = face.verts
        if face.kind == FaceKind.GAP:
            return [(a, b), (c, a)]
        return [(a, b), (b, c), (c, a)]

    def _add_face(self, kind, verts):
        self._fid += 1
        face = Face(self._fid, kind, verts)
        self.faces[face.id] = face
        for e in self._face_edges(face):
            if DEBUG_CHECKS and e in self.edge_face:
                raise InternalInvariantViolation(f"duplicate directed edge {e}")
            self.edge_face[e] = face.id
        if self._log is not None:
            self._log.append(("add", face))
        return face

    def _kill_face(self, face):
        if not face.alive:
            raise InternalInvariantViolation("double kill")
        face.alive = False
        del self.faces[face.id]
        for e in self._face_edges(face):
            if self.edge_face.get(e) == face.id:
                del self.edge_face[e]
        if self._log is not None:
            self._log.append(("kill", face, face.ring_prev, face.ring_next))
        pending = face.bucket
        face.bucket = []
        return pending

    def _set_ring(self, face, prev=None, nxt=None):
        if prev is not None:
            if self._log is not None:
                self._log.append(("ring_prev", face, face.ring_prev))
            face.ring_prev = prev
        if nxt is not None:
            if self._log is not None:
                self._log.append(("ring_next", face, face.ring_next))
            face.ring_next = nxt

    def _link(self, a, b):
        """Make b the ring successor of a."""
        self._set_ring(a, nxt=b)
        self._set_ring(b, prev=a)

    def _rollback(self, mark):
        log = self._log
        while len(log) > mark:
            entry = log.pop()
            tag = entry[0]
            if tag == "add":
                face = entry[1]
                face.alive = False
                self.faces.pop(face.id, None)
                for e in self._face_edges(face):
                    if self.edge_face.get(e) == face.id:
                        del self.edge_face[e]
            elif tag == "kill":
                _, face, rp, rn = entry
                face.alive = True
                self.faces[face.id] = face
                for e in self._face_edges(face):
                    self.edge_face[e] = face.id
                face.ring_prev = rp
                face.ring_next = rn
            elif tag == "ring_prev":
                entry[1].ring_prev = entry[2]
            elif tag == "ring_next":
                entry[1].ring_next = entry[2]
            elif tag == "bucket":
                _, site_idx, old_face = entry
                cur = self._site_face.get(site_idx)
                if cur is not None and cur.alive:
                    try:
                        cur.bucket.remove(site_idx)
                    except ValueError:
                        pass
                self._site_face[site_idx] = old_face
                if old_face is not None:
                    old_face.bucket.append(site_idx)

    # -- membership tests (O(1) per face)

    def face_contains(self, face, pt, tol=None):
        poly = self.poly
        if tol is None:
            tol = poly.eps_len()
        a, b, c = (self.coord(v) for v in face.verts)
        if face.kind != FaceKind.GAP:
            return (
                (b - a).cross(pt - a) >= -tol * (b - a).norm()
                and (c - b).cross(pt - b) >= -tol * (c - b).norm()
                and (a - c).cross(pt - c) >= -tol * (a - c).norm()
            )
        # gap: the wedge at the site between the rays to its boundary
        # vertices, intersected with the polygon (implicit for interior pts)
        d1 = b - a
        d2 = c - a
        w = pt - a
        if w.norm() <= tol:
            return True
        full = (math.atan2(d2.y, d2.x) - math.atan2(d1.y, d1.x)) % (2.0 * math.pi)
        ang = (math.atan2(w.y, w.x) - math.atan2(d1.y, d1.x)) % (2.0 * math.pi)
        slack = 4.0 * tol / max(w.norm(), 1e-300)
        return ang <= full + slack or ang >= 2.0 * math.pi - slack

    # -- point location

    def locate(self, pt, hint=None):
        """Face containing pt: a visibility walk from the hint with an
        exhaustive-scan fallback on cycles."""
        self.poly.require_interior(pt)
        face = hint
        if face is None or not face.alive:
            face = next(iter(self.faces.values()))
        seen = set()
        while True:
            if face.id in seen:
                break
            seen.add(face.id)
            if self.face_contains(face, pt):
                return face
            nxt = None
            for (u, v) in self._face_edges(face):
                cu, cv = self.coord(u), self.coord(v)
                if (cv - cu).cross(pt - cu) < 0.0:
                    twin = self.edge_face.get((v, u))
                    if twin is not None:
                        nxt = self.faces[twin]
                        break
            if nxt is None:
                break
            face = nxt
        for f in self.faces.values():
            if self.face_contains(f, pt):
                return f
        raise InternalInvariantViolation(f"no face contains {pt}")

    # -- lazily cached balls

    def face_circumcircle(self, face):
        if face.kind != FaceKind.STANDARD:
            raise InternalInvariantViolation("circumcircle of a non-triangle")
        if face.circ is None:
            pa, pb, pc = (self.coord(v) for v in face.verts)
            out = circumcircle(self.poly, pa, pb, pc)
            if isinstance(out, CircumcircleAbsence):
                raise _NeedsPerturbation(f"triangle {face.id} lost its ball")
            face.circ = out
        return face.circ

    def tooth_ball(self, face):
        if face.kind != FaceKind.TOOTH:
            raise InternalInvariantViolation("tooth ball of a non-tooth")
        if face.infball is None:
            a, b, x = face.verts
            pa, pb = self.coord(a), self.coord(b)
            bp = x.bp
            if bp.t != 0.0:
                u = self.poly.edge_vector(bp.edge).unit().rot90()
            else:
                other = bisector_endpoint(self.poly, pb, pa)
                u = bisector_tangent_at_endpoint(self.poly, pa, pb, bp, other)
            face.infball = ball_at_infinity(self.poly, bp, u, pa)
        return face.infball

    def _encroaches(self, face, pt):
        """Strict in-circle test of pt against a standard triangle's ball or
        a tooth's limit ball; raises inside the ambiguity shell."""
        if face.kind == FaceKind.STANDARD:
            circ = self.face_circumcircle(face)
            d = hilbert_distance(self.poly, pt, circ.center)
            if abs(d - circ.radius) <= tolerances.eps_dist():
                raise _NeedsPerturbation("in-circle tie")
            return d < circ.radius
        ball = self.tooth_ball(face)
        c = ball.signed_clearance(pt)
        if abs(c) <= self.poly.eps_len():
            raise _NeedsPerturbation("tooth in-circle tie")
        return c > 0.0

    # -- bucket plumbing

    def _rebucket(self, pending, created):
        for s in pending:
            pt = self.sites[s]
            placed = None
            for face in created:
                if face.alive and self.face_contains(face, pt):
                    placed = face
                    break
            if placed is None:
                placed = self.locate(pt)
            if self._log is not None:
                self._log.append(("bucket", s, self._site_face.get(s)))
            self._site_face[s] = placed
            placed.bucket.append(s)

    # -- construction ---------------------------------------------------

    def _init_two(self):
        a, b = SiteRef(0), SiteRef(1)
        pa, pb = self.sites[0], self.sites[1]
        x = self._new_bref(bisector_endpoint(self.poly, pa, pb))
        y = self._new_bref(bisector_endpoint(self.poly, pb, pa))
        t1 = self._add_face(FaceKind.TOOTH, (a, b, x))
        t2 = self._add_face(FaceKind.TOOTH, (b, a, y))
        g_a = self._add_face(FaceKind.GAP, (a, x, y))
        g_b = self._add_face(FaceKind.GAP, (b, y, x))
        self._link(t1, g_a)
        self._link(g_a, t2)
        self._link(t2, g_b)
        self._link(g_b, t1)
        self.n_inserted = 2

    def _insert_at(self, face, k):
        pt = self.sites[k]
        for v in face.verts:
            if isinstance(v, SiteRef) and (self.coord(v) - pt).norm() <= self.poly.eps_len():
                raise DuplicateSite(f"site {k} coincides with site {v.index}")
        if face.kind == FaceKind.STANDARD:
            self._insert_in_triangle(face, k)
        elif face.kind == FaceKind.TOOTH:
            self._insert_in_tooth(face, k)
        else:
            self._insert_in_gap(face, k)

    def _insert_in_triangle(self, face, k):
        p = SiteRef(k)
        a, b, c = face.verts
        pending = self._kill_face(face)
        f1 = self._add_face(FaceKind.STANDARD, (p, a, b))
        f2 = self._add_face(FaceKind.STANDARD, (p, b, c))
        f3 = self._add_face(FaceKind.STANDARD, (p, c, a))
        self._rebucket(pending, (f1, f2, f3))
        self._flip_edge(a, b, k)
        self._flip_edge(b, c, k)
        self._flip_edge(c, a, k)

    def _insert_in_tooth(self, face, k):
        p = SiteRef(k)
        ppt = self.sites[k]
        a, b, x = face.verts
        pa, pb = self.coord(a), self.coord(b)
        x1 = self._new_bref(bisector_endpoint(self.poly, pa, ppt))
        y1 = self._new_bref(bisector_endpoint(self.poly, ppt, pb))
        gap_prev = face.ring_prev
        gap_next = face.ring_next
        before = gap_prev.ring_prev
        after = gap_next.ring_next
        pending = list(self._kill_face(face))
        pending += self._kill_face(gap_prev)
        pending += self._kill_face(gap_next)
        tri = self._add_face(FaceKind.STANDARD, (a, b, p))
        t_pb = self._add_face(FaceKind.TOOTH, (p, b, y1))
        t_ap = self._add_face(FaceKind.TOOTH, (a, p, x1))
        g_mid = self._add_face(FaceKind.GAP, (p, y1, x1))
        g_prev = self._add_face(
            FaceKind.GAP, (gap_prev.verts[0], gap_prev.verts[1], y1)
        )
        g_next = self._add_face(
            FaceKind.GAP, (gap_next.verts[0], x1, gap_next.verts[2])
        )
        self._link(before, g_prev)
        self._link(g_prev, t_pb)
        self._link(t_pb, g_mid)
        self._link(g_mid, t_ap)
        self._link(t_ap, g_next)
        self._link(g_next, after)
        self._rebucket(pending, (tri, t_pb, t_ap, g_mid, g_prev, g_next))
        self._flip_edge(a, b, k)
        self._fix_tooth(t_ap, k)
        self._fix_tooth(t_pb, k)

    def _insert_in_gap(self, face, k):
        p = SiteRef(k)
        ppt = self.sites[k]
        a, frm, to = face.verts
        pa = self.coord(a)
        x_n = self._new_bref(bisector_endpoint(self.poly, pa, ppt))
        y_n = self._new_bref(bisector_endpoint(self.poly, ppt, pa))
        before = face.ring_prev
        after = face.ring_next
        pending = self._kill_face(face)
        g1 = self._add_face(FaceKind.GAP, (a, frm, y_n))
        t_pa = self._add_face(FaceKind.TOOTH, (p, a, y_n))
        g_mid = self._add_face(FaceKind.GAP, (p, y_n, x_n))
        t_ap = self._add_face(FaceKind.TOOTH, (a, p, x_n))
        g2 = self._add_face(FaceKind.GAP, (a, x_n, to))
        self._link(before, g1)
        self._link(g1, t_pa)
        self._link(t_pa, g_mid)
        self._link(g_mid, t_ap)
        self._link(t_ap, g2)
        self._link(g2, after)
        self._rebucket(pending, (g1, t_pa, g_mid, t_ap, g2))
        self._fix_tooth(t_ap, k)
        self._fix_tooth(t_pa, k)

    def _flip_edge(self, a, b, k):
        """In-circle test across directed edge a->b whose left face holds
        the new site; flips or retriangulates the right side on failure."""
        right_id = self.edge_face.get((b, a))
        left_id = self.edge_face.get((a, b))
        if right_id is None or left_id is None:
            return
        right = self.faces[right_id]
        ppt = self.sites[k]
        if right.kind == FaceKind.GAP:
            raise InternalInvariantViolation("site-site edge borders a gap")
        if not self._encroaches(right, ppt):
            return
        p = SiteRef(k)
        left = self.faces[left_id]
        if DEBUG_CHECKS and p not in left.verts:
            raise InternalInvariantViolation("flip apex not in the left face")
        if right.kind == FaceKind.STANDARD:
            # cycle (b, a, c)
            c = next(v for v in right.verts if v != a and v != b)
            pending = list(self._kill_face(left))
            pending += self._kill_face(right)
            f1 = self._add_face(FaceKind.STANDARD, (p, a, c))
            f2 = self._add_face(FaceKind.STANDARD, (b, p, c))
            self._rebucket(pending, (f1, f2))
            self._flip_edge(a, c, k)
            self._flip_edge(c, b, k)
            return
        # right face is the tooth (b, a, x): remove it together with the
        # left triangle; the region is re-covered by two teeth and a gap
        x = right.verts[2]
        pa, pb = self.coord(a), self.coord(b)
        x_new = self._new_bref(bisector_endpoint(self.poly, ppt, pa))
        y_new = self._new_bref(bisector_endpoint(self.poly, pb, ppt))
        gap_l = right.ring_prev
        gap_r = right.ring_next
        before = gap_l.ring_prev
        after = gap_r.ring_next
        pending = list(self._kill_face(left))
        pending += self._kill_face(right)
        pending += self._kill_face(gap_l)
        pending += self._kill_face(gap_r)
        t_pa = self._add_face(FaceKind.TOOTH, (p, a, x_new))
        t_bp = self._add_face(FaceKind.TOOTH, (b, p, y_new))
        g_mid = self._add_face(FaceKind.GAP, (p, x_new, y_new))
        g_l = self._add_face(FaceKind.GAP, (gap_l.verts[0], gap_l.verts[1], x_new))
        g_r = self._add_face(FaceKind.GAP, (gap_r.verts[0], y_new, gap_r.verts[2]))
        self._link(before, g_l)
        self._link(g_l, t_pa)
        self._link(t_pa, g_mid)
        self._link(g_mid, t_bp)
        self._link(t_bp, g_r)
        self._link(g_r, after)
        self._rebucket(pending, (t_pa, t_bp, g_mid, g_l, g_r))

    # -- tooth overlap repair

    def _teeth_overlap(self, t_abx, t_bcy):
        """Overlap test for a tooth (a,b,x) against its ring-predecessor
        (b,c,y), by the angular order of x, y and c around the shared b."""
        a, b, x = t_abx.verts
        b2, c, y = t_bcy.verts
        if b2 != b:
            raise InternalInvariantViolation("ring teeth do not share a site")
        pb = self.coord(b)
        th_c = self.coord(c) - pb
        th_y = self.coord(y) - pb
        th_x = self.coord(x) - pb
        base = math.atan2(th_c.y, th_c.x)
        ang_y = (math.atan2(th_y.y, th_y.x) - base) % (2.0 * math.pi)
        ang_x = (math.atan2(th_x.y, th_x.x) - base) % (2.0 * math.pi)
        return ang_y > ang_x + 1e-12

    def _merge_teeth(self, t_abx, t_bcy, k):
        """Replace overlapping teeth (a,b,x) and (b,c,y) with the standard
        triangle (a,b,c) and the tooth (a,c,z); returns the new tooth."""
        a, b, x = t_abx.verts
        _, c, y = t_bcy.verts
        pa, pb, pc = self.coord(a), self.coord(b), self.coord(c)
        out = circumcircle(self.poly, pa, pb, pc)
        if isinstance(out, CircumcircleAbsence):
            raise _NeedsPerturbation("overlapping teeth without a ball")
        z = self._new_bref(bisector_endpoint(self.poly, pa, pc))
        gap_between = t_abx.ring_prev
        gap_ll = t_bcy.ring_prev
        gap_rr = t_abx.ring_next
        if gap_between is not t_bcy.ring_next:
            raise InternalInvariantViolation("teeth are not ring neighbors")
        before = gap_ll.ring_prev
        after = gap_rr.ring_next
        pending = list(self._kill_face(t_abx))
        pending += self._kill_face(t_bcy)
        pending += self._kill_face(gap_between)
        pending += self._kill_face(gap_ll)
        pending += self._kill_face(gap_rr)
        tri = self._add_face(FaceKind.STANDARD, (a, b, c))
        tri.circ = out
        tooth = self._add_face(FaceKind.TOOTH, (a, c, z))
        g_l = self._add_face(FaceKind.GAP, (gap_ll.verts[0], gap_ll.verts[1], z))
        g_r = self._add_face(FaceKind.GAP, (gap_rr.verts[0], z, gap_rr.verts[2]))
        self._link(before, g_l)
        self._link(g_l, tooth)
        self._link(tooth, g_r)
        self._link(g_r, after)
        self._rebucket(pending, (tri, tooth, g_l, g_r))
        return tooth, (a, b, c)

    def _fix_tooth(self, tooth, k):
        """Resolve overlaps of a fresh tooth with its ring neighbors."""
        if not tooth.alive:
            return
        a, b, x = tooth.verts
        t_cw = tooth.ring_prev.ring_prev if tooth.ring_prev else None
        # a two-teeth ring (hull reduced to one edge) wraps onto itself and
        # never overlaps: the teeth share both sites
        if (
            t_cw is not None
            and t_cw.alive
            and t_cw.kind == FaceKind.TOOTH
            and t_cw is not tooth
            and t_cw.verts[1] != a
        ):
            if self._teeth_overlap(tooth, t_cw):
                new_tooth, (ta, tb, tc) = self._merge_teeth(tooth, t_cw, k)
                if isinstance(a, SiteRef) and a.index == k:
                    self._flip_edge(tb, tc, k)
                    self._fix_tooth(new_tooth, k)
                return
        t_ccw = tooth.ring_next.ring_next if tooth.ring_next else None
        if (
            t_ccw is not None
            and t_ccw.alive
            and t_ccw.kind == FaceKind.TOOTH
            and t_ccw is not tooth
            and t_ccw.verts[0] != b
        ):
            if self._teeth_overlap(t_ccw, tooth):
                new_tooth, (ta, tb, tc) = self._merge_teeth(t_ccw, tooth, k)
                if isinstance(b, SiteRef) and b.index == k:
                    self._flip_edge(ta, tb, k)
                    self._fix_tooth(new_tooth, k)
                return

    # -- public mutation entry points

    def insert_next_pending(self, k):
        """Insert site k (already in self.sites) using its bucket location,
        with one perturbation retry inside the ambiguity shell."""
        face = self._site_face.pop(k, None)
        if face is not None and face.alive:
            try:
                face.bucket.remove(k)
            except ValueError:
                pass
        if face is None or not face.alive:
            face = self.locate(self.sites[k])
        mark = len(self._log) if self._log is not None else None
        original = self.sites[k]
        try:
            self._insert_at(face, k)
            self.n_inserted += 1
            return
        except _NeedsPerturbation:
            if mark is None:
                raise GeneralPositionViolation(
                    "ambiguous in-circle decision without a journal"
                )
            self._rollback(mark)
        rng = random.Random((self.seed, k, "perturb"))
        ang = rng.uniform(0.0, 2.0 * math.pi)
        off = 1e-10 * self.poly.diam
        self.sites[k] = Point2(
            original.x + off * math.cos(ang), original.y + off * math.sin(ang)
        )
        face = self.locate(self.sites[k])
        try:
            self._insert_at(face, k)
            self.n_inserted += 1
        except _NeedsPerturbation as ex:
            raise GeneralPositionViolation(
                f"site {k} still ambiguous after perturbation: {ex}"
            ) from ex

    def insert(self, pt):
        """Public insertion of a new site into a finished triangulation."""
        self.poly.require_interior(pt)
        for i, s in enumerate(self.sites[: self.n_inserted]):
            if (s - pt).norm() <= self.poly.eps_len():
                raise DuplicateSite(f"coincides with site {i}")
        k = len(self.sites)
        self.sites.append(pt)
        self.site_order.append(max(self.site_order, default=-1) + 1)
        self._log = []
        try:
            face = self.locate(pt)
            mark = len(self._log)
            try:
                self._insert_at(face, k)
                self.n_inserted += 1
            except _NeedsPerturbation:
                self._rollback(mark)
                rng = random.Random((self.seed, k, "perturb"))
                ang = rng.uniform(0.0, 2.0 * math.pi)
                off = 1e-10 * self.poly.diam
                self.sites[k] = Point2(
                    pt.x + off * math.cos(ang), pt.y + off * math.sin(ang)
                )
                face = self.locate(self.sites[k])
                try:
                    self._insert_at(face, k)
                    self.n_inserted += 1
                except _NeedsPerturbation as ex:
                    raise GeneralPositionViolation(str(ex)) from ex
        finally:
            self._log = None

    # -- read-only views -------------------------------------------------

    def standard_triangles(self):
        """Site-index triples of all standard triangles, canonical order."""
        out = set()
        for f in self.faces.values():
            if f.kind == FaceKind.STANDARD:
                out.add(frozenset(v.index for v in f.verts))
        return {tuple(sorted(t)) for t in out}

    def teeth(self):
        return [f for f in self.faces.values() if f.kind == FaceKind.TOOTH]

    def gaps(self):
        return [f for f in self.faces.values() if f.kind == FaceKind.GAP]

    def site_edges(self):
        """Undirected site-index pairs present in the triangulation."""
        out = set()
        for (u, v) in self.edge_face:
            if isinstance(u, SiteRef) and isinstance(v, SiteRef):
                out.add(tuple(sorted((u.index, v.index))))
        return out

    def ring(self):
        """Teeth and gaps in CCW ring order, starting at some tooth."""
        start = None
        for f in self.faces.values():
            if f.kind == FaceKind.TOOTH:
                start = f
                break
        if start is None:
            raise InternalInvariantViolation("triangulation without teeth")
        out = []
        f = start
        while True:
            out.append(f)
            f = f.ring_next
            if f is None:
                raise InternalInvariantViolation("broken boundary ring")
            if f is start:
                break
            if len(out) > 4 * len(self.faces) + 8:
                raise InternalInvariantViolation("boundary ring does not close")
        return out

    # -- validation -------------------------------------------------------

    def validate(self, in_circle_tol=1e-7, endpoint_tol=1e-7):
        """All structural invariants; returns a list of violation strings."""
        out = []
        out += self._validate_ring()
        out += self._validate_edges()
        out += self._validate_local_delaunay(in_circle_tol)
        out += self._validate_teeth(endpoint_tol)
        out += self._validate_planarity()
        out += self._validate_spanning()
        return out

    def _validate_ring(self):
        out = []
        try:
            ring = self.ring()
        except InternalInvariantViolation as ex:
            return [f"ring: {ex}"]
        for i, f in enumerate(ring):
            nxt = ring[(i + 1) % len(ring)]
            if f.kind == nxt.kind:
                out.append(f"ring: faces {f.id},{nxt.id} both {f.kind.value}")
            if f.kind == FaceKind.TOOTH and nxt.kind == FaceKind.GAP:
                if nxt.verts[0] != f.verts[0] or nxt.verts[1] != f.verts[2]:
                    out.append(f"ring: gap {nxt.id} does not continue tooth {f.id}")
            if f.kind == FaceKind.GAP and nxt.kind == FaceKind.TOOTH:
                if nxt.verts[2] != f.verts[2] or nxt.verts[1] != f.verts[0]:
                    out.append(f"ring: tooth {nxt.id} does not continue gap {f.id}")
        ring_ids = {f.id for f in ring}
        for f in self.faces.values():
            if f.kind != FaceKind.STANDARD and f.id not in ring_ids:
                out.append(f"ring: face {f.id} not on the ring")
        return out

    def _validate_edges(self):
        out = []
        for (u, v), fid in self.edge_face.items():
            if (v, u) not in self.edge_face:
                # boundary-adjacent edges (site-boundary) must pair too;
                # only the virtual arc sides have no twin and those are not
                # registered at all
                out.append(f"edge {u}->{v} has no twin")
        return out

    def _validate_local_delaunay(self, tol):
        out = []
        for (u, v), fid in self.edge_face.items():
            if not (isinstance(u, SiteRef) and isinstance(v, SiteRef)):
                continue
            left = self.faces[fid]
            rid = self.edge_face.get((v, u))
            if rid is None:
                continue
            right = self.faces[rid]
            if right.kind == FaceKind.GAP or left.kind == FaceKind.GAP:
                continue
            apex = next(w for w in left.verts if w != u and w != v)
            if not isinstance(apex, SiteRef):
                continue
            pt = self.coord(apex)
            if right.kind == FaceKind.STANDARD:
                try:
                    circ = self.face_circumcircle(right)
                except _NeedsPerturbation:
                    out.append(f"triangle {right.id} admits no ball")
                    continue
                d = hilbert_distance(self.poly, pt, circ.center)
                if d < circ.radius - tol:
                    out.append(
                        f"edge {u.index}-{v.index}: site {apex.index} inside "
                        f"triangle {right.id} ball by {circ.radius - d:.2e}"
                    )
            else:
                ball = self.tooth_ball(right)
                c = ball.signed_clearance(pt)
                if c > tol * self.poly.diam:
                    out.append(
                        f"edge {u.index}-{v.index}: site {apex.index} inside "
                        f"tooth {right.id} ball by {c:.2e}"
                    )
        return out

    def _validate_teeth(self, tol):
        out = []
        for f in self.teeth():
            a, b, x = f.verts
            res = endpoint_residual(self.poly, self.coord(a), self.coord(b), x.bp)
            if res > tol:
                out.append(f"tooth {f.id}: endpoint residual {res:.2e}")
        return out

    @staticmethod
    def _vkey(ref):
        if isinstance(ref, SiteRef):
            return (0, ref.index)
        return (1, ref.uid)

    def _validate_planarity(self):
        out = []
        segs = []
        for (u, v), fid in self.edge_face.items():
            if self._vkey(u) < self._vkey(v):
                segs.append((self.coord(u), self.coord(v), u, v))
        eps = self.poly.eps_len()
        for i in range(len(segs)):
            a1, b1, u1, v1 = segs[i]
            for j in range(i + 1, len(segs)):
                a2, b2, u2, v2 = segs[j]
                if self._segments_cross(a1, b1, a2, b2, eps):
                    out.append(f"edges {u1}-{v1} and {u2}-{v2} cross")
        return out

    @staticmethod
    def _segments_cross(a1, b1, a2, b2, eps):
        # shared (co-located) endpoints do not count as crossings
        for p in (a1, b1):
            for q in (a2, b2):
                if (p - q).norm() <= eps:
                    return False
        d1 = b1 - a1
        d2 = b2 - a2
        den = d1.cross(d2)
        if abs(den) <= 1e-300:
            return False
        t = (a2 - a1).cross(d2) / den
        s = (a2 - a1).cross(d1) / den
        margin = 1e-9
        return margin < t < 1.0 - margin and margin < s < 1.0 - margin

    def _validate_spanning(self):
        n = self.n_inserted
        if n <= 1:
            return []
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for (i, j) in self.site_edges():
            parent[find(i)] = find(j)
        roots = {find(i) for i in range(n)}
        if len(roots) != 1:
            return [f"site graph has {len(roots)} components"]
        return []

    # -- sampled dual ------------------------------------------------------

    def voronoi_edges_sampled(self, samples_per_edge=8):
        """Polylines approximating the Voronoi edges dual to each site-site
        Delaunay edge: endpoints at the incident face centers (circumcenter
        or boundary bisector endpoint), interior points from ray probes."""
        out = []
        done = set()
        for (u, v), fid in list(self.edge_face.items()):
            if not (isinstance(u, SiteRef) and isinstance(v, SiteRef)):
                continue
            key = tuple(sorted((u.index, v.index)))
            if key in done:
                continue
            done.add(key)
            rid = self.edge_face.get((v, u))
            if rid is None:
                continue
            ends = []
            for f in (self.faces[fid], self.faces[rid]):
                if f.kind == FaceKind.STANDARD:
                    ends.append(self.face_circumcircle(f).center)
                elif f.kind == FaceKind.TOOTH:
                    ends.append(f.verts[2].bp.point)
                else:
                    ends = None
                    break
            if ends is None:
                continue
            p = self.coord(u)
            q = self.coord(v)
            d0 = ends[0] - p
            d1 = ends[1] - p
            a0 = math.atan2(d0.y, d0.x)
            span = (math.atan2(d1.y, d1.x) - a0) % (2.0 * math.pi)
            if span > math.pi:
                a0 = (a0 + span) % (2.0 * math.pi)
                span = 2.0 * math.pi - span
            pts = [ends[0]]
            for i in range(1, samples_per_edge):
                ang = a0 + span * i / samples_per_edge
                hit = bisector_ray_intersection(
                    self.poly, p, q, Point2(math.cos(ang), math.sin(ang))
                )
                if hit is not None:
                    pts.append(hit)
            pts.append(ends[1])
            out.append(((u.index, v.index), pts))
        return out


def build(poly, sites, seed=0):
    """Randomized incremental construction: shuffles the sites with the
    given seed, seeds the structure with two sites and the endpoints of
    their bisector, then inserts the rest with bucket-based location."""
    pts = [s if isinstance(s, Point2) else Point2(float(s[0]), float(s[1])) for s in sites]
    if len(pts) < 2:
        raise TooFewSites(f"need at least 2 sites, got {len(pts)}")
    for s in pts:
        poly.require_interior(s)
    eps = poly.eps_len()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if (pts[i] - pts[j]).norm() <= eps:
                raise DuplicateSites(f"sites {i} and {j} coincide")
    order = list(range(len(pts)))
    random.Random(seed).shuffle(order)
    shuffled = [pts[i] for i in order]
    tri = AugmentedTriangulation(poly, shuffled, order, seed=seed)
    tri._log = []
    try:
        tri._init_two()
        # bucket the rest
        for k in range(2, len(shuffled)):
            face = tri.locate(shuffled[k])
            tri._site_face[k] = face
            face.bucket.append(k)
        for k in range(2, len(shuffled)):
            tri.insert_next_pending(k)
    finally:
        tri._log = None
        tri._site_face = {}
    return tri