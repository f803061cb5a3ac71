"""Low-level numeric kernels over raw vertex arrays.

Everything here operates on plain float64 arrays/scalars so the functions
can be JIT-compiled with numba. The polygon is given as parallel vertex
coordinate arrays ``xs, ys`` in counterclockwise order. Set
``HILBERT_NO_NUMBA=1`` to force the pure-Python versions (same code,
much slower).
"""

import math
import os

import numpy as np

try:
    if os.environ.get("HILBERT_NO_NUMBA"):
        raise ImportError
    from numba import njit as _njit

    def _jit(fn):
        return _njit(cache=True)(fn)

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - exercised via HILBERT_NO_NUMBA
    def _jit(fn):
        return fn

    NUMBA_ENABLED = False


@_jit
def exit_edge(xs, ys, px, py, dx, dy):
    """Index of the boundary edge crossed by the ray from interior (px,py)
    along (dx,dy).

    Binary search on the vertex directions around the interior point: seen
    from an interior point the vertices of a strictly convex CCW polygon
    wind once counterclockwise, so their angles relative to the direction
    of vertex 0 are strictly increasing. O(log m) comparisons, no atan2.
    """
    m = len(xs)
    w0x = xs[0] - px
    w0y = ys[0] - py
    cd = w0x * dy - w0y * dx
    dd = w0x * dx + w0y * dy
    hd = 0 if (cd > 0.0 or (cd == 0.0 and dd > 0.0)) else 1
    lo = 0
    hi = m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        ux = xs[mid] - px
        uy = ys[mid] - py
        cu = w0x * uy - w0y * ux
        du = w0x * ux + w0y * uy
        hu = 0 if (cu > 0.0 or (cu == 0.0 and du > 0.0)) else 1
        if hu != hd:
            leq = hu < hd
        else:
            leq = (ux * dy - uy * dx) >= 0.0
        if leq:
            lo = mid
        else:
            hi = mid
    return lo


@_jit
def ray_exit(xs, ys, px, py, dx, dy, snap_len):
    """Exact boundary hit of the ray from (px,py) along (dx,dy).

    Returns (edge, t_edge, hx, hy, t_ray) where the hit point is
    vertices[edge] + t_edge * edge_vector and t_ray is the parameter along
    the (non-normalized) direction. Hits within snap_len of a vertex snap
    to it, with the canonical t = 0 representation.
    """
    m = len(xs)
    e = exit_edge(xs, ys, px, py, dx, dy)
    e1 = e + 1
    if e1 == m:
        e1 = 0
    ax = xs[e]
    ay = ys[e]
    bx = xs[e1]
    by = ys[e1]
    ex = bx - ax
    ey = by - ay
    den = ex * dy - ey * dx
    elen = math.sqrt(ex * ex + ey * ey)
    if abs(den) <= 1e-300:
        # ray parallel to the exit edge: it grazes a vertex
        s = 1.0 if (dx * ex + dy * ey) > 0.0 else 0.0
    else:
        s = ((px - ax) * dy - (py - ay) * dx) / den
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
    if s * elen <= snap_len:
        t_ray = ((ax - px) * dx + (ay - py) * dy) / (dx * dx + dy * dy)
        return e, 0.0, ax, ay, t_ray
    if (1.0 - s) * elen <= snap_len:
        t_ray = ((bx - px) * dx + (by - py) * dy) / (dx * dx + dy * dy)
        return e1, 0.0, bx, by, t_ray
    hx = ax + s * ex
    hy = ay + s * ey
    t_ray = ((hx - px) * dx + (hy - py) * dy) / (dx * dx + dy * dy)
    return e, s, hx, hy, t_ray


@_jit
def hilbert_distance_raw(xs, ys, px, py, qx, qy, zero_len, snap_len):
    """Hilbert distance between two interior points (no validity checks)."""
    dx = qx - px
    dy = qy - py
    ell = math.sqrt(dx * dx + dy * dy)
    if ell <= zero_len:
        return 0.0
    _, _, bx, by, _ = ray_exit(xs, ys, px, py, dx, dy, snap_len)
    _, _, ax, ay, _ = ray_exit(xs, ys, px, py, -dx, -dy, snap_len)
    dqa = math.sqrt((qx - ax) ** 2 + (qy - ay) ** 2)
    dpa = math.sqrt((px - ax) ** 2 + (py - ay) ** 2)
    dpb = math.sqrt((px - bx) ** 2 + (py - by) ** 2)
    dqb = math.sqrt((qx - bx) ** 2 + (qy - by) ** 2)
    return 0.5 * math.log((dqa / dpa) * (dpb / dqb))


@_jit
def clearance(xs, ys, px, py):
    """Minimum inward signed distance from (px,py) to the edge lines.

    Positive strictly inside, negative outside. Linear in m.
    """
    m = len(xs)
    best = math.inf
    for i in range(m):
        j = i + 1
        if j == m:
            j = 0
        ex = xs[j] - xs[i]
        ey = ys[j] - ys[i]
        d = (ex * (py - ys[i]) - ey * (px - xs[i])) / math.sqrt(ex * ex + ey * ey)
        if d < best:
            best = d
    return best


@_jit
def signed_clearance_convex(bxs, bys, px, py):
    """Same as :func:`clearance` but for an arbitrary CCW convex polygon
    given by its own vertex arrays (used for ball membership tests)."""
    return clearance(bxs, bys, px, py)


@_jit
def ball_points_raw(xs, ys, px, py, rho, snap_len):
    """Boundary points of the Hilbert ball B(p, rho): for every polygon
    vertex, the two points on the chord through that vertex at Hilbert
    distance rho from p (one toward the vertex, one away).

    Returns a (2m, 2) array: row i is the point toward vertex i, row i+m
    the opposite one. Ordering around p is left to the caller.
    """
    m = len(xs)
    res_x = np.empty(2 * m)
    res_y = np.empty(2 * m)
    r = math.exp(2.0 * rho)
    for i in range(m):
        dx = xs[i] - px
        dy = ys[i] - py
        _, _, bx, by, _ = ray_exit(xs, ys, px, py, dx, dy, snap_len)
        _, _, ax, ay, _ = ray_exit(xs, ys, px, py, -dx, -dy, snap_len)
        a = math.sqrt((px - ax) ** 2 + (py - ay) ** 2)
        b = math.sqrt((px - bx) ** 2 + (py - by) ** 2)
        ux = (bx - px) / b
        uy = (by - py) / b
        sf = a * b * (r - 1.0) / (b + a * r)
        sb = a * b * (r - 1.0) / (a + b * r)
        res_x[i] = px + sf * ux
        res_y[i] = py + sf * uy
        res_x[i + m] = px - sb * ux
        res_y[i + m] = py - sb * uy
    return res_x, res_y
