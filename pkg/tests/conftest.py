"""Shared oracles and fixtures.

The oracles here are deliberately naive and share no code with the
package: rational arithmetic for geometry, exhaustive enumeration for graph
properties, and an explicit minor search for planarity.
"""

from __future__ import annotations

import itertools
import math
import os
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


# --------------------------------------------------------------------------
# geometry oracles (rational, parametric form)


def _F(p):
    return Fraction(p[0]), Fraction(p[1])


def _cross2(ux, uy, vx, vy):
    return ux * vy - uy * vx


def oracle_orientation(a, b, c) -> int:
    ax, ay = _F(a)
    bx, by = _F(b)
    cx, cy = _F(c)
    d = _cross2(bx - ax, by - ay, cx - ax, cy - ay)
    return (d > 0) - (d < 0)


def oracle_proper_cross(p1, p2, q1, q2) -> bool:
    """Open segments share exactly one point interior to both."""
    ax, ay = _F(p1)
    bx, by = _F(p2)
    cx, cy = _F(q1)
    dx, dy = _F(q2)
    rx, ry = bx - ax, by - ay
    sx, sy = dx - cx, dy - cy
    den = _cross2(rx, ry, sx, sy)
    if den == 0:
        return False
    t = _cross2(cx - ax, cy - ay, sx, sy) / den
    u = _cross2(cx - ax, cy - ay, rx, ry) / den
    return 0 < t < 1 and 0 < u < 1


def oracle_touch_interior(p1, p2, q1, q2) -> bool:
    """Closed segment q1q2 meets the open segment p1p2."""
    ax, ay = _F(p1)
    bx, by = _F(p2)
    cx, cy = _F(q1)
    dx, dy = _F(q2)
    rx, ry = bx - ax, by - ay
    if rx == 0 and ry == 0:
        return False
    sx, sy = dx - cx, dy - cy
    den = _cross2(rx, ry, sx, sy)
    if den != 0:
        t = _cross2(cx - ax, cy - ay, sx, sy) / den
        u = _cross2(cx - ax, cy - ay, rx, ry) / den
        return 0 < t < 1 and 0 <= u <= 1
    if _cross2(rx, ry, cx - ax, cy - ay) != 0:
        return False  # parallel, different lines
    rr = rx * rx + ry * ry
    t1 = ((cx - ax) * rx + (cy - ay) * ry) / rr
    t2 = ((dx - ax) * rx + (dy - ay) * ry) / rr
    return min(t1, t2) < 1 and max(t1, t2) > 0


def _geodesic_offset(p, q):
    """Integer shift taking q to its translate nearest p (exact)."""
    return tuple(Fraction(round(Fraction(p[i]) - Fraction(q[i]))) for i in range(2))


def torus_copies(q1, q2):
    """The nine planar translates of the geodesic representative of q1q2,
    with rational coordinates."""
    a = _F(q1)
    off = _geodesic_offset(q1, q2)
    b = (Fraction(q2[0]) + off[0], Fraction(q2[1]) + off[1])
    for ox, oy in itertools.product((-1, 0, 1), repeat=2):
        yield (a[0] + ox, a[1] + oy), (b[0] + ox, b[1] + oy)


def geodesic_rep(p1, p2):
    a = _F(p1)
    off = _geodesic_offset(p1, p2)
    return a, (Fraction(p2[0]) + off[0], Fraction(p2[1]) + off[1])


def oracle_torus(pred, p1, p2, q1, q2) -> bool:
    """Torus predicate via all translates of the second segment."""
    a, b = geodesic_rep(p1, p2)
    return any(pred(a, b, c, d) for c, d in torus_copies(q1, q2))


def oracle_distance(p, q, metric: str) -> float:
    dx = abs(p[0] - q[0])
    dy = abs(p[1] - q[1])
    if metric == "torus":
        dx, dy = min(dx, 1 - dx), min(dy, 1 - dy)
    return math.hypot(dx, dy)


# --------------------------------------------------------------------------
# graph oracles (exhaustive)


def oracle_edges(points, r, metric) -> set[tuple[int, int]]:
    n = len(points)
    out = set()
    for i in range(n):
        for j in range(i + 1, n):
            dx = abs(points[i][0] - points[j][0])
            dy = abs(points[i][1] - points[j][1])
            if metric == "torus":
                dx, dy = min(dx, 1 - dx), min(dy, 1 - dy)
            if math.sqrt(dx * dx + dy * dy) <= r:
                out.add((i, j))
    return out


def adj_sets(n, edges):
    adj = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def oracle_components(n, edges) -> list[list[int]]:
    adj = adj_sets(n, edges)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        queue, comp = [s], []
        while queue:
            v = queue.pop()
            comp.append(v)
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
        comps.append(sorted(comp))
    return sorted(comps)


def oracle_has_clique(n, edges, k) -> bool:
    adj = adj_sets(n, edges)
    return any(
        all(b in adj[a] for a, b in itertools.combinations(sub, 2)) for sub in itertools.combinations(range(n), k)
    )


def oracle_connected_k(n, edges, k) -> bool:
    return any(len(c) >= k for c in oracle_components(n, edges))


def oracle_mis_size(n, edges) -> int:
    adj = adj_sets(n, edges)
    masks = [sum(1 << u for u in adj[v]) for v in range(n)]
    best = 0
    # exhaustive over subsets, pruned by independence as they grow
    def grow(i, chosen, size):
        nonlocal best
        if size + (n - i) <= best:
            return
        if i == n:
            best = max(best, size)
            return
        if not masks[i] & chosen:
            grow(i + 1, chosen | (1 << i), size + 1)
        grow(i + 1, chosen, size)

    grow(0, 0, 0)
    return best


def oracle_crossings(points, edges, metric) -> set[frozenset]:
    pts = [tuple(map(float, p)) for p in points]
    edges = sorted(edges)
    out = set()
    for e, f in itertools.combinations(edges, 2):
        if set(e) & set(f):
            continue
        args = (pts[e[0]], pts[e[1]], pts[f[0]], pts[f[1]])
        hit = oracle_torus(oracle_proper_cross, *args) if metric == "torus" else oracle_proper_cross(*args)
        if hit:
            out.add(frozenset((e, f)))
    return out


def oracle_free_edges(points, edges, metric) -> set[tuple[int, int]]:
    pts = [tuple(map(float, p)) for p in points]
    free = set()
    for e in edges:
        touched = False
        for f in edges:
            if f == e:
                continue
            args = (pts[e[0]], pts[e[1]], pts[f[0]], pts[f[1]])
            if metric == "torus":
                touched = oracle_torus(oracle_touch_interior, *args)
            else:
                touched = oracle_touch_interior(*args)
            if touched:
                break
        if not touched:
            free.add(e)
    return free


# -- planarity by explicit minor search ------------------------------------


def _k33_subgraph(vs, es) -> bool:
    vs = sorted(vs)
    for side in itertools.combinations(vs[1:], 2):
        left = (vs[0],) + side
        right = [v for v in vs if v not in left]
        if all(frozenset((a, b)) in es for a in left for b in right):
            return True
    return False


def oracle_is_planar(n, edges) -> bool:
    """No K5 / K3,3 minor, found by searching vertex deletions and edge
    contractions down to 5 or 6 branch sets (memoised)."""
    start = frozenset(frozenset(((a,), (b,))) for a, b in edges)
    memo: dict = {}

    def has_minor(es: frozenset, vs: frozenset) -> bool:
        key = (vs, es)
        if key in memo:
            return memo[key]
        v, m = len(vs), len(es)
        res = False
        if v < 5 or m < 9:
            res = False
        elif v == 5 and m == 10:
            res = True
        elif v == 6 and _k33_subgraph(vs, es):
            res = True
        else:
            deg = {x: 0 for x in vs}
            for e in es:
                for x in e:
                    deg[x] += 1
            # a branch set needs degree >= 3 in either target
            low = [x for x in vs if deg[x] < 3]
            moves = []
            if low:
                x = low[0]
                moves.append(("del", x))
                if deg[x] == 2:
                    moves.append(("con", next(e for e in es if x in e)))
            else:
                moves.extend(("del", x) for x in sorted(vs))
                moves.extend(("con", e) for e in sorted(es, key=lambda e: sorted(e)))
            for kind, arg in moves:
                if kind == "del":
                    nvs = vs - {arg}
                    nes = frozenset(e for e in es if arg not in e)
                else:
                    a, b = sorted(arg)
                    merged = tuple(sorted(a + b))
                    nvs = (vs - {a, b}) | {merged}
                    nes = set()
                    for e in es:
                        if e == arg:
                            continue
                        x, y = tuple(e)
                        x = merged if x in (a, b) else x
                        y = merged if y in (a, b) else y
                        if x != y:
                            nes.add(frozenset((x, y)))
                    nes = frozenset(nes)
                if has_minor(nes, nvs):
                    res = True
                    break
        memo[key] = res
        return res

    vs = frozenset((i,) for i in range(n))
    return not has_minor(start, vs)


def random_points(rng, n, dyadic_bits=None):
    pts = rng.random((n, 2))
    if dyadic_bits:
        pts = np.floor(pts * 2**dyadic_bits) / 2**dyadic_bits
    return pts
