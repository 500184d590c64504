"""Geometric primitives for unit disk graphs in the unit square or torus.

Orientation signs are evaluated exactly: a floating-point determinant is
accepted when it clears Shewchuk's static error bound, otherwise the
determinant is recomputed with rational arithmetic.  Every predicate in
this module is therefore deterministic on degenerate input.

Vectorised versions (``*_many``) operate on ``(m, 2)`` coordinate arrays
and are what the graph-level detectors use; the scalar functions wrap them.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import TorusRadiusTooLarge

# (3 + 16 eps) * eps with eps = 2**-53
_CCW_ERRBOUND = (3.0 + 16.0 * 2.0**-53) * 2.0**-53

TORUS_MAX_LENGTH = 0.25


class Metric(enum.Enum):
    SQUARE = "square"
    TORUS = "torus"

    @classmethod
    def parse(cls, value: "Metric | str") -> "Metric":
        if isinstance(value, Metric):
            return value
        return cls(str(value).lower())


class Point(NamedTuple):
    x: float
    y: float

    @classmethod
    def canonical(cls, x: float, y: float) -> "Point":
        """Reduce (x, y) modulo 1 into [0, 1)^2."""
        x = float(x) % 1.0
        y = float(y) % 1.0
        # -tiny % 1.0 rounds to 1.0
        if x >= 1.0:
            x = 0.0
        if y >= 1.0:
            y = 0.0
        return cls(x, y)


class Segment(NamedTuple):
    """Segment from ``a`` to ``b``.

    ``lift_offset`` is the translate of ``b`` realising the torus geodesic
    (always ``(0, 0)`` under the square metric).
    """

    a: Point
    b: Point
    lift_offset: tuple[int, int] = (0, 0)

    @property
    def lifted_b(self) -> tuple[float, float]:
        return (self.b.x + self.lift_offset[0], self.b.y + self.lift_offset[1])


def make_segment(a, b, metric: Metric | str = Metric.SQUARE) -> Segment:
    a = Point(*map(float, a))
    b = Point(*map(float, b))
    if Metric.parse(metric) is Metric.SQUARE:
        return Segment(a, b, (0, 0))
    off = (_nearest_shift(a.x - b.x), _nearest_shift(a.y - b.y))
    return Segment(a, b, off)


def _nearest_shift(delta: float) -> int:
    # integer t in {-1, 0, 1} minimising |delta - t|
    return int(round(delta))


# --------------------------------------------------------------------------
# distances


def distance(p, q, metric: Metric | str = Metric.SQUARE) -> float:
    dx = abs(float(p[0]) - float(q[0]))
    dy = abs(float(p[1]) - float(q[1]))
    if Metric.parse(metric) is Metric.TORUS:
        dx = min(dx, 1.0 - dx)
        dy = min(dy, 1.0 - dy)
    return math.sqrt(dx * dx + dy * dy)


def pair_distances(p: np.ndarray, q: np.ndarray, metric: Metric) -> np.ndarray:
    """Row-wise distances between two ``(m, 2)`` arrays.

    Uses exactly the same float operations as :func:`distance`, so scalar and
    vectorised results agree bit for bit.
    """
    d = np.abs(p - q)
    if metric is Metric.TORUS:
        d = np.minimum(d, 1.0 - d)
    return np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1])


# --------------------------------------------------------------------------
# orientation


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orientation(a, b, c) -> int:
    """Sign of the signed area of triangle abc: +1 ccw, -1 cw, 0 collinear."""
    arr = lambda p: np.array([[float(p[0]), float(p[1])]])
    return int(orient_many(arr(a), arr(b), arr(c))[0])


def orient_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Exact orientation signs for rows of three ``(m, 2)`` arrays."""
    detleft = (a[:, 0] - c[:, 0]) * (b[:, 1] - c[:, 1])
    detright = (a[:, 1] - c[:, 1]) * (b[:, 0] - c[:, 0])
    det = detleft - detright
    bound = _CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    sign = np.sign(det).astype(np.int8)
    # both products exactly zero means an exactly zero determinant
    exact_zero = (detleft == 0.0) & (detright == 0.0)
    sign[exact_zero] = 0
    unsure = (np.abs(det) <= bound) & ~exact_zero
    for i in np.flatnonzero(unsure):
        sign[i] = _orient_exact(a[i, 0], a[i, 1], b[i, 0], b[i, 1], c[i, 0], c[i, 1])
    return sign


# --------------------------------------------------------------------------
# torus lifting


def lift_near(anchor: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Translate each row of ``q`` by an integer vector in {-1,0,1}^2 so it
    lies nearest to the matching row of ``anchor``."""
    return q + np.rint(anchor - q)


def lift_cluster(anchor: np.ndarray, *qs: np.ndarray):
    """Planar coordinates for ``anchor`` and each ``q`` lifted next to it.

    Same geometry as :func:`lift_near`, but exact in floating point: where a
    row straddles the seam in some coordinate, values >= 1/2 are moved down
    by 1 (exact for values in [1/2, 1)) instead of moving small values up.
    Also returns the per-row span of the lifted cluster, the larger of the
    two coordinate spans.
    """
    anchor = np.asarray(anchor, dtype=float)
    qs = [np.asarray(q, dtype=float) for q in qs]
    offs = [np.rint(anchor - q) for q in qs]
    lifted = [q + o for q, o in zip(qs, offs)]
    allp = np.stack([anchor] + lifted)
    span = (allp.max(axis=0) - allp.min(axis=0)).max(axis=1)
    straddle = np.zeros(anchor.shape, dtype=bool)
    for o in offs:
        straddle |= o != 0
    out = [np.where(straddle & (x >= 0.5), x - 1.0, x) for x in [anchor] + qs]
    return out, span


def lift_quads(p1, p2, q1, q2, metric: Metric):
    """Planar coordinates for segment pairs (p1p2, q1q2).

    Under the torus every endpoint is moved to its translate nearest ``p1``;
    rows where either lifted segment is not its own geodesic, or where the
    four points spread over half a period or more, are flagged in the
    returned mask.  Such segments cannot touch when both are shorter than
    1/4, since touching puts all four ends within 1/4 of a common point.
    """
    if metric is Metric.SQUARE:
        return p1, p2, q1, q2, np.ones(len(p1), dtype=bool)
    (p1, p2, q1, q2), span = lift_cluster(p1, p2, q1, q2)
    ok = (np.abs(p2 - p1) < 0.5).all(axis=1) & (np.abs(q2 - q1) < 0.5).all(axis=1) & (span < 0.5)
    return p1, p2, q1, q2, ok


def _check_torus_lengths(metric: Metric, *segments: Segment) -> None:
    if metric is not Metric.TORUS:
        return
    for s in segments:
        if distance(s.a, s.b, metric) >= TORUS_MAX_LENGTH:
            raise TorusRadiusTooLarge(
                f"segment of torus length {distance(s.a, s.b, metric):.6g} >= 1/4"
            )


# --------------------------------------------------------------------------
# crossing predicates


def cross_many(p1, p2, q1, q2) -> np.ndarray:
    """True where the open segments p1p2 and q1q2 share a point.

    Collinear overlap is not a crossing; touching at an endpoint is not a
    crossing.
    """
    o1 = orient_many(p1, p2, q1)
    o2 = orient_many(p1, p2, q2)
    o3 = orient_many(q1, q2, p1)
    o4 = orient_many(q1, q2, p2)
    return (o1 * o2 < 0) & (o3 * o4 < 0)


def _strictly_between(p, a, b) -> bool:
    """For p collinear with a != b: is p in the open segment ab?  Exact."""
    px, py, ax, ay, bx, by = map(Fraction, (p[0], p[1], a[0], a[1], b[0], b[1]))
    t_num = (px - ax) * (bx - ax) + (py - ay) * (by - ay)
    t_den = (bx - ax) ** 2 + (by - ay) ** 2
    return 0 < t_num < t_den


def _touch_interior_exact(p1, p2, q1, q2) -> bool:
    """Does closed segment q1q2 meet the open segment p1p2?  Exact."""
    if tuple(p1) == tuple(p2):
        return False  # a coincident pair has no interior
    o1 = _orient_exact(*p1, *p2, *q1)
    o2 = _orient_exact(*p1, *p2, *q2)
    if o1 == 0 and o2 == 0:
        # collinear: project q onto the p1->p2 parameter line
        fx = list(map(Fraction, (*p1, *p2, *q1, *q2)))
        ax, ay, bx, by, c1x, c1y, c2x, c2y = fx
        den = (bx - ax) ** 2 + (by - ay) ** 2
        t1 = ((c1x - ax) * (bx - ax) + (c1y - ay) * (by - ay)) / den
        t2 = ((c2x - ax) * (bx - ax) + (c2y - ay) * (by - ay)) / den
        lo, hi = min(t1, t2), max(t1, t2)
        return lo < 1 and hi > 0
    if o1 != 0 and o1 == o2:
        return False
    if o1 == 0:
        return _strictly_between(q1, p1, p2)
    if o2 == 0:
        return _strictly_between(q2, p1, p2)
    # q1, q2 strictly on opposite sides; crossing point interior to p1p2?
    o3 = _orient_exact(*q1, *q2, *p1)
    o4 = _orient_exact(*q1, *q2, *p2)
    return o3 * o4 < 0


def touch_interior_many(p1, p2, q1, q2) -> np.ndarray:
    """True where closed segment q1q2 meets the open interior of p1p2.

    Includes proper crossings, T-junctions (an endpoint of q inside p) and
    collinear overlap of positive length.
    """
    o1 = orient_many(p1, p2, q1)
    o2 = orient_many(p1, p2, q2)
    o3 = orient_many(q1, q2, p1)
    o4 = orient_many(q1, q2, p2)
    out = (o1 * o2 < 0) & (o3 * o4 < 0)
    same_side = (o1 != 0) & (o1 == o2)
    shared = (
        (p1 == q1).all(axis=1)
        | (p1 == q2).all(axis=1)
        | (p2 == q1).all(axis=1)
        | (p2 == q2).all(axis=1)
    )
    # a shared endpoint with only one zero orientation means the segments
    # meet at that endpoint and nowhere else
    shared_simple = shared & ((o1 != 0) | (o2 != 0))
    degenerate = ((o1 == 0) | (o2 == 0) | (o3 == 0) | (o4 == 0)) & ~same_side & ~shared_simple
    for i in np.flatnonzero(degenerate):
        out[i] = _touch_interior_exact(
            tuple(p1[i]), tuple(p2[i]), tuple(q1[i]), tuple(q2[i])
        )
    out[same_side | shared_simple] = False
    return out


def _as_rows(s1: Segment, s2: Segment):
    row = lambda p: np.array([[float(p[0]), float(p[1])]])
    return row(s1.a), row(s1.b), row(s2.a), row(s2.b)


def segments_cross(s1: Segment, s2: Segment, metric: Metric | str = Metric.SQUARE) -> bool:
    """True iff the two segments share a point interior to both."""
    metric = Metric.parse(metric)
    _check_torus_lengths(metric, s1, s2)
    p1, p2, q1, q2, ok = lift_quads(*_as_rows(s1, s2), metric)
    return bool(ok[0] and cross_many(p1, p2, q1, q2)[0])


def interior_intersected(e: Segment, f: Segment, metric: Metric | str = Metric.SQUARE) -> bool:
    """True iff ``f`` touches an interior point of ``e``."""
    metric = Metric.parse(metric)
    _check_torus_lengths(metric, e, f)
    p1, p2, q1, q2, ok = lift_quads(*_as_rows(e, f), metric)
    return bool(ok[0] and touch_interior_many(p1, p2, q1, q2)[0])


# --------------------------------------------------------------------------
# half disks


def half_disks_nonempty(u, v, others, metric: Metric | str = Metric.SQUARE) -> tuple[bool, bool]:
    """Occupancy of the two open half-disks with diameter uv.

    Returns ``(left, right)`` relative to the oriented segment u -> v.
    """
    metric = Metric.parse(metric)
    others = np.asarray(others, dtype=float).reshape(-1, 2)
    if len(others) == 0:
        return (False, False)
    u = np.array([[float(u[0]), float(u[1])]])
    v = np.array([[float(v[0]), float(v[1])]])
    if metric is Metric.TORUS:
        (u, v, others), _ = lift_cluster(np.repeat(u, len(others), axis=0), np.repeat(v, len(others), axis=0), others)
        left, right = half_disk_masks(u, v, others)
    else:
        left, right = half_disk_masks(u[0], v[0], others)
    return (bool(left.any()), bool(right.any()))


def half_disk_masks(u: np.ndarray, v: np.ndarray, pts: np.ndarray):
    """Masks of ``pts`` lying in the open left / right half-disks of uv.

    ``u`` and ``v`` are single points or rows matching ``pts``."""
    n = len(pts)
    u = np.broadcast_to(np.asarray(u, dtype=float), (n, 2))
    v = np.broadcast_to(np.asarray(v, dtype=float), (n, 2))
    c = 0.5 * (u + v)
    rad2 = 0.25 * ((v - u) ** 2).sum(axis=1)
    inside = ((pts - c) ** 2).sum(axis=1) < rad2
    side = orient_many(u, v, pts)
    return inside & (side > 0), inside & (side < 0)
