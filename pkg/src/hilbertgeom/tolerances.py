"""Numerical tolerance knobs.

All geometric predicates work on coordinates implicitly normalized so that
the polygon's bounding box has diameter <= 1: thresholds that compare
lengths are multiplied by the polygon diameter, which is equivalent to
pre-scaling the input (Hilbert distances are invariant under that map).

``HILBERT_EPS`` in the environment overrides both defaults; the CLI's
``--eps`` flag does the same per run.
"""

import os

_DEFAULT = 1e-9

#: absolute tolerance on normalized coordinates (predicates, snapping)
EPS_GEOM = float(os.environ.get("HILBERT_EPS", _DEFAULT))

#: absolute tolerance on Hilbert distances
EPS_DIST = float(os.environ.get("HILBERT_EPS", _DEFAULT))

#: clearance below which a point counts as sitting on the boundary; distances
#: to such points are effectively infinite and operations refuse them.
EPS_BOUNDARY = 1e-12


def set_eps(value):
    """Override both geometric and metric tolerances (used by the CLI)."""
    global EPS_GEOM, EPS_DIST
    EPS_GEOM = float(value)
    EPS_DIST = float(value)


def eps_geom():
    return EPS_GEOM


def eps_dist():
    return EPS_DIST
