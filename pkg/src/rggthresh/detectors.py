"""Exact decision procedures for the graph properties of G(n, r).

Crossing-type searches never look at all edge pairs.  If edges ``uv`` and
``cd`` cross (or ``cd`` touches the interior of ``uv``), one of the four
endpoints is adjacent to the other three, so ``cd`` has an endpoint in the
closed neighbourhood of ``u`` or ``v``.  Candidate pairs are generated from
that two-hop join.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import KTooLarge, RadiusTooLargeForGrid
from .geometry import (
    Metric,
    cross_many,
    half_disk_masks,
    lift_cluster,
    orient_many,
    lift_quads,
    touch_interior_many,
)
from .graph import RggGraph, component_labels, components, max_component_size
from .properties import Kind, Property, TriStateDecision

MAX_CLIQUE_K = 7
MIS_EXACT_CAP = 50
_CHUNK_COST = 2_000_000


@dataclass(frozen=True)
class CrossingPair:
    e1: tuple[int, int]
    e2: tuple[int, int]


@dataclass(frozen=True)
class Anchor:
    crown: int
    triangle: tuple[int, int]
    apex: int


# --------------------------------------------------------------------------
# CSR helpers


def _expand(ptr: np.ndarray, idx: np.ndarray, owners: np.ndarray, verts: np.ndarray):
    """For each (owner, vert), emit (owner, w) for every w in row ``vert``."""
    cnt = ptr[verts + 1] - ptr[verts]
    total = int(cnt.sum())
    own = np.repeat(owners, cnt)
    first = np.repeat(ptr[verts], cnt)
    within = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    return own, idx[first + within]


def _edge_keys(g: RggGraph) -> np.ndarray:
    return g.edges[:, 0] * g.n + g.edges[:, 1]


def _lookup_edges(g: RggGraph, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Edge ids of pairs {a, b}, or -1 where absent."""
    keys = _edge_keys(g)
    q = np.minimum(a, b) * g.n + np.maximum(a, b)
    pos = np.searchsorted(keys, q)
    pos = np.minimum(pos, max(len(keys) - 1, 0))
    if len(keys) == 0:
        return np.full(len(q), -1, dtype=np.int64)
    return np.where((keys[pos] == q) & (a != b), pos, -1)


def _incident_edges(g: RggGraph) -> np.ndarray:
    """Edge id for every entry of ``g.indices``."""
    rows = np.repeat(np.arange(g.n), g.degree())
    return _lookup_edges(g, rows, g.indices)


def _closed_csr(g: RggGraph):
    n = g.n
    deg = g.degree()
    cptr = g.indptr + np.arange(n + 1)
    cidx = np.empty(n + len(g.indices), dtype=np.int64)
    cidx[cptr[:-1]] = np.arange(n)
    rows = np.repeat(np.arange(n), deg)
    slot = cptr[rows] + 1 + (np.arange(len(g.indices)) - g.indptr[rows])
    cidx[slot] = g.indices
    return cptr, cidx


def _edge_chunks(g: RggGraph, eids: np.ndarray):
    """Split edge ids so each chunk's two-hop expansion stays bounded."""
    deg = g.degree()
    cptr, cidx = _closed_csr(g)
    own, x = _expand(cptr, cidx, np.arange(g.n), np.arange(g.n))
    reach = np.bincount(own, weights=deg[x], minlength=g.n)
    cost = reach[g.edges[eids, 0]] + reach[g.edges[eids, 1]] + 1
    csum = np.cumsum(cost)
    cuts = np.searchsorted(csum, np.arange(_CHUNK_COST, csum[-1] if len(csum) else 0, _CHUNK_COST))
    return [c for c in np.split(eids, np.unique(cuts)) if len(c)]


class _Join:
    """Precomputed arrays for two-hop candidate generation."""

    def __init__(self, g: RggGraph):
        self.g = g
        self.inc = _incident_edges(g)
        self.cptr, self.cidx = _closed_csr(g)

    def pairs(self, eids: np.ndarray):
        """Unique (e, f), f != e, with f incident to N[u] or N[v]."""
        g = self.g
        if len(eids) == 0:
            z = np.zeros(0, dtype=np.int64)
            return z, z
        u, v = g.edges[eids, 0], g.edges[eids, 1]
        o1, x1 = _expand(self.cptr, self.cidx, eids, u)
        o2, x2 = _expand(self.cptr, self.cidx, eids, v)
        own = np.concatenate([o1, o2])
        x = np.concatenate([x1, x2])
        ox = np.unique(own * g.n + x)
        own, x = np.divmod(ox, g.n)
        e, f = _expand(g.indptr, self.inc, own, x)
        ef = np.unique(e * g.m + f)
        e, f = np.divmod(ef, g.m)
        keep = e != f
        return e[keep], f[keep]


def _segment_coords(g: RggGraph, e: np.ndarray, f: np.ndarray):
    pts = g.points
    p1 = pts[g.edges[e, 0]]
    p2 = pts[g.edges[e, 1]]
    q1 = pts[g.edges[f, 0]]
    q2 = pts[g.edges[f, 1]]
    return lift_quads(p1, p2, q1, q2, g.metric)


# --------------------------------------------------------------------------
# connectivity and cliques


def has_edge(g: RggGraph) -> bool:
    return g.m > 0


def has_connected_k(g: RggGraph, k: int) -> bool:
    if k < 2:
        raise ValueError("k must be >= 2")
    return max_component_size(g) >= k


def _neighbor_sets(g: RggGraph) -> list[set[int]]:
    return [set(nb) for nb in g.adjacency]


def _core(adj: list[set[int]], min_deg: int) -> set[int]:
    """Vertices of the ``min_deg``-core."""
    alive = set(range(len(adj)))
    deg = [len(a) for a in adj]
    stack = [v for v in alive if deg[v] < min_deg]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] < min_deg:
                    stack.append(u)
    return alive


def degeneracy_order(adj: list[set[int]], vertices) -> list[int]:
    """Smallest-last order restricted to ``vertices`` (ties by index)."""
    vertices = set(vertices)
    deg = {v: len(adj[v] & vertices) for v in vertices}
    heap = [(d, v) for v, d in deg.items()]
    heapq.heapify(heap)
    done: set[int] = set()
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if v in done or d != deg[v]:
            continue
        done.add(v)
        order.append(v)
        for u in adj[v]:
            if u in vertices and u not in done:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return order


def _extend_clique(adj, clique: list[int], cand: list[int], k: int):
    if len(clique) == k:
        return clique
    for i, u in enumerate(cand):
        if len(clique) + (len(cand) - i) < k:
            return None
        nxt = [w for w in cand[i + 1 :] if w in adj[u]]
        if len(clique) + 1 + len(nxt) >= k:
            found = _extend_clique(adj, clique + [u], nxt, k)
            if found:
                return found
    return None


def find_clique(g: RggGraph, k: int) -> list[int] | None:
    """A k-clique, or None.  Exhaustive within later-neighbourhoods of a
    degeneracy order of the (k-1)-core."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return [0] if g.n else None
    if k == 2:
        return list(map(int, g.edges[0])) if g.m else None
    adj = _neighbor_sets(g)
    core = _core(adj, k - 1)
    order = degeneracy_order(adj, core)
    rank = {v: i for i, v in enumerate(order)}
    for v in order:
        later = sorted((u for u in adj[v] if u in rank and rank[u] > rank[v]), key=rank.__getitem__)
        if len(later) < k - 1:
            continue
        found = _extend_clique(adj, [v], later, k)
        if found:
            return sorted(found)
    return None


def has_clique_k(g: RggGraph, k: int) -> TriStateDecision:
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > MAX_CLIQUE_K:
        raise KTooLarge(f"clique search is limited to k <= {MAX_CLIQUE_K}, got {k}")
    found = find_clique(g, k)
    if found is not None:
        return TriStateDecision.yes(found)
    return TriStateDecision.no(kind="exhaustive-search", k=k)


def is_clique(g: RggGraph, vertices) -> bool:
    vs = list(vertices)
    return all(g.has_edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1 :])


# --------------------------------------------------------------------------
# crossings


def _crossing_array(g: RggGraph, stop_at_first: bool) -> np.ndarray:
    if g.m < 2:
        return np.zeros((0, 2), dtype=np.int64)
    join = _Join(g)
    found = []
    for chunk in _edge_chunks(g, np.arange(g.m)):
        e, f = join.pairs(chunk)
        ea, eb = g.edges[e, 0], g.edges[e, 1]
        fa, fb = g.edges[f, 0], g.edges[f, 1]
        keep = (f > e) & (ea != fa) & (ea != fb) & (eb != fa) & (eb != fb)
        e, f = e[keep], f[keep]
        p1, p2, q1, q2, ok = _segment_coords(g, e, f)
        hit = ok & cross_many(p1, p2, q1, q2)
        if hit.any():
            found.append(np.stack([e[hit], f[hit]], axis=1))
            if stop_at_first:
                break
    if not found:
        return np.zeros((0, 2), dtype=np.int64)
    out = np.concatenate(found)
    out = out[np.lexsort((out[:, 1], out[:, 0]))]
    return out[:1] if stop_at_first else out


def crossing_pairs(g: RggGraph, stop_at_first: bool = False) -> list[CrossingPair]:
    """Properly crossing edge pairs, ordered by edge index."""
    arr = _crossing_array(g, stop_at_first)
    E = g.edges
    return [CrossingPair(tuple(map(int, E[a])), tuple(map(int, E[b]))) for a, b in arr.tolist()]


def brute_force_crossings(g: RggGraph) -> list[CrossingPair]:
    """Every edge pair tested; reference implementation for tests."""
    m = g.m
    if m < 2:
        return []
    e, f = np.triu_indices(m, k=1)
    ea, eb = g.edges[e, 0], g.edges[e, 1]
    fa, fb = g.edges[f, 0], g.edges[f, 1]
    keep = (ea != fa) & (ea != fb) & (eb != fa) & (eb != fb)
    e, f = e[keep], f[keep]
    p1, p2, q1, q2, ok = _segment_coords(g, e, f)
    hit = ok & cross_many(p1, p2, q1, q2)
    E = g.edges
    return [CrossingPair(tuple(map(int, E[a])), tuple(map(int, E[b]))) for a, b in zip(e[hit], f[hit])]


def is_plane(g: RggGraph) -> bool:
    return len(_crossing_array(g, stop_at_first=True)) == 0


def count_crossings(g: RggGraph) -> int:
    return len(_crossing_array(g, stop_at_first=False))


def crossing_invariants(g: RggGraph, pair: CrossingPair) -> dict[str, bool]:
    """Check the local structure every crossing must have.

    ``adjacent_sides``: two adjacent sides of the quadrilateral are edges.
    ``within_2r``: all endpoints are pairwise within 2r.
    ``crown``: some endpoint is within r of the other three.
    """
    from .geometry import distance

    a, b = pair.e1
    c, d = pair.e2
    quad = [a, c, b, d]  # cyclic order around the convex quadrilateral
    sides = [(quad[i], quad[(i + 1) % 4]) for i in range(4)]
    adjacent = any(g.has_edge(*sides[i]) and g.has_edge(*sides[(i + 1) % 4]) for i in range(4))
    pts = g.points
    dist = lambda i, j: distance(pts[i], pts[j], g.metric)
    verts = [a, b, c, d]
    within = all(dist(i, j) <= 2 * g.r for i in verts for j in verts if i < j)
    crown = any(all(dist(x, y) <= g.r for y in verts if y != x) for x in verts)
    return {"adjacent_sides": adjacent, "within_2r": within, "crown": crown}


def find_anchor(g: RggGraph) -> Anchor | None:
    """Triangle acd plus an edge ab crossing cd, searched triangle-first."""
    if g.m < 2:
        return None
    pts = g.points
    for chunk in _edge_chunks(g, np.arange(g.m)):
        c, d = g.edges[chunk, 0], g.edges[chunk, 1]
        # every triangle appears once for each of its edges as cd
        tri_cd, a = _expand(g.indptr, g.indices, chunk, c)
        cc, dd = g.edges[tri_cd, 0], g.edges[tri_cd, 1]
        closes = (a != dd) & (_lookup_edges(g, a, dd) >= 0)
        a, cc, dd = a[closes], cc[closes], dd[closes]
        if len(a) == 0:
            continue
        t = np.arange(len(a))
        t_rep, b = _expand(g.indptr, g.indices, t, a)
        a, cc, dd = a[t_rep], cc[t_rep], dd[t_rep]
        keep = (b != cc) & (b != dd)
        a, b, cc, dd = a[keep], b[keep], cc[keep], dd[keep]
        p1, p2, q1, q2, ok = lift_quads(pts[a], pts[b], pts[cc], pts[dd], g.metric)
        hit = np.flatnonzero(ok & cross_many(p1, p2, q1, q2))
        if len(hit):
            i = hit[np.lexsort((b[hit], dd[hit], cc[hit], a[hit]))[0]]
            return Anchor(int(a[i]), (int(cc[i]), int(dd[i])), int(b[i]))
    return None


# --------------------------------------------------------------------------
# planarity


def _nx_component(g: RggGraph, comp: np.ndarray) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(comp.tolist())
    cs = set(comp.tolist())
    for v in comp.tolist():
        for u in g.neighbors(v).tolist():
            if u > v and u in cs:
                G.add_edge(v, u)
    return G


def _component_edge_counts(g: RggGraph):
    labels = component_labels(g)
    sizes = np.bincount(labels) if g.n else np.zeros(0, dtype=np.int64)
    ecount = np.bincount(labels[g.edges[:, 0]], minlength=len(sizes)) if g.m else np.zeros(len(sizes), dtype=np.int64)
    return labels, sizes, ecount


def planarity_certificate(g: RggGraph) -> dict:
    """Planarity of the abstract graph with a Kuratowski witness.

    Components with fewer than 5 vertices or 9 edges are planar outright,
    components with more than 3v - 6 edges are not; the rest are tested
    with the left-right planarity algorithm.  The witness is a subdivision
    of K5 or K3,3 taken from the first non-planar component.
    """
    if g.n == 0:
        return {"planar": True}
    labels, sizes, ecount = _component_edge_counts(g)
    for lab in np.flatnonzero((sizes >= 5) & (ecount >= 9)):
        comp = np.flatnonzero(labels == lab)
        G = _nx_component(g, comp)
        planar, cert = nx.check_planarity(G, counterexample=True)
        if not planar:
            return {
                "planar": False,
                "witness_vertices": sorted(int(v) for v in cert.nodes),
                "witness_edges": sorted(tuple(sorted((int(a), int(b)))) for a, b in cert.edges),
            }
    return {"planar": True}


def is_planar(g: RggGraph) -> bool:
    if g.n == 0:
        return True
    labels, sizes, ecount = _component_edge_counts(g)
    cand = (sizes >= 5) & (ecount >= 9)
    if (cand & (ecount > 3 * sizes - 6)).any():
        return False
    for lab in np.flatnonzero(cand):
        comp = np.flatnonzero(labels == lab)
        if not nx.check_planarity(_nx_component(g, comp))[0]:
            return False
    return True


# --------------------------------------------------------------------------
# free edges


def _half_disk_blocked(g: RggGraph, eids: np.ndarray) -> np.ndarray:
    """True for edges uv with a point in each open half-disk on diameter uv.

    Two such points are closer than |uv| <= r, so they are adjacent and
    their edge crosses uv.  Every point of the disk is a neighbour of u.
    The disk is shrunk by a relative 1e-12 so rounding cannot admit a point
    on its boundary.
    """
    u, v = g.edges[eids, 0], g.edges[eids, 1]
    own, w = _expand(g.indptr, g.indices, np.arange(len(eids)), u)
    keep = w != v[own]
    own, w = own[keep], w[keep]
    pts = g.points
    pu, pv, pw = pts[u[own]], pts[v[own]], pts[w]
    if g.metric is Metric.TORUS:
        (pu, pv, pw), _ = lift_cluster(pu, pv, pw)
    c = 0.5 * (pu + pv)
    rad2 = 0.25 * ((pv - pu) ** 2).sum(axis=1)
    inside = ((pw - c) ** 2).sum(axis=1) < rad2 * (1.0 - 1e-12)
    side = orient_many(pu[inside], pv[inside], pw[inside])
    own = own[inside]
    left = np.bincount(own[side > 0], minlength=len(eids)) > 0
    right = np.bincount(own[side < 0], minlength=len(eids)) > 0
    return left & right


def _touched_chunks(g: RggGraph, eids: np.ndarray):
    """Yield (chunk, touched) over ``eids`` in the given order."""
    join = _Join(g)
    for chunk in _edge_chunks(g, eids):
        touched = _half_disk_blocked(g, chunk)
        rest = chunk[~touched]
        e, f = join.pairs(rest)
        p1, p2, q1, q2, ok = _segment_coords(g, e, f)
        hit = np.zeros(g.m, dtype=bool)
        hit[e[ok & touch_interior_many(p1, p2, q1, q2)]] = True
        touched[~touched] = hit[rest]
        yield chunk, touched


def free_edge_mask(g: RggGraph) -> np.ndarray:
    """Boolean mask over ``g.edges``: True where no other edge touches the
    edge's open interior."""
    free = np.ones(g.m, dtype=bool)
    if g.m < 2:
        return free
    for chunk, touched in _touched_chunks(g, np.arange(g.m)):
        free[chunk] = ~touched
    return free


def free_edges(g: RggGraph) -> set[tuple[int, int]]:
    mask = free_edge_mask(g)
    return {tuple(map(int, e)) for e in g.edges[mask]}


def brute_force_free_edges(g: RggGraph) -> set[tuple[int, int]]:
    m = g.m
    if m == 0:
        return set()
    e, f = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    e, f = e.ravel(), f.ravel()
    keep = e != f
    e, f = e[keep], f[keep]
    p1, p2, q1, q2, ok = _segment_coords(g, e, f)
    hit = ok & touch_interior_many(p1, p2, q1, q2)
    touched = np.zeros(m, dtype=bool)
    touched[e[hit]] = True
    return {tuple(map(int, x)) for x in g.edges[~touched]}


def has_free_edge(g: RggGraph) -> bool:
    if g.m < 2:
        return g.m == 1
    # short edges are the likeliest to be free, so try them first
    order = np.argsort(g.lengths, kind="stable")
    return any(not t.all() for _, t in _touched_chunks(g, order))


def all_edges_free(g: RggGraph) -> bool:
    if g.m < 2:
        return True
    order = np.argsort(g.lengths, kind="stable")[::-1].copy()
    return not any(t.any() for _, t in _touched_chunks(g, order))


def long_edge_cutoff(n: int) -> float:
    return math.sqrt(8.0 * math.log(n) / n) if n > 0 else 0.0


def long_edges(g: RggGraph, cutoff: float | None = None) -> set[tuple[int, int]]:
    """Edges of length at least sqrt(8 ln n / n) (inclusive)."""
    cut = long_edge_cutoff(g.n) if cutoff is None else cutoff
    return {tuple(map(int, e)) for e in g.edges[g.lengths >= cut]}


def edge_crossed_by(g: RggGraph, eid: int) -> tuple[int, int] | None:
    """Some edge touching the interior of edge ``eid``, or None.

    Tries the half-disk shortcut first: a point in each open half-disk on
    uv gives an edge through the disk's interior, hence across uv.
    """
    u, v = map(int, g.edges[eid])
    pts = g.points
    near = g.neighbors(u)
    near = near[near != v]
    if len(near):
        pu, pv, q = pts[u], pts[v], pts[near]
        if g.metric is Metric.TORUS:
            m = len(q)
            (pu, pv, q), _ = lift_cluster(np.repeat(pu[None], m, 0), np.repeat(pv[None], m, 0), q)
        left, right = half_disk_masks(pu, pv, q)
        if left.any() and right.any():
            w1, w2 = int(near[left][0]), int(near[right][0])
            if g.has_edge(w1, w2):
                return (min(w1, w2), max(w1, w2))
    e, f = _Join(g).pairs(np.array([eid], dtype=np.int64))
    p1, p2, q1, q2, ok = _segment_coords(g, e, f)
    hit = np.flatnonzero(ok & touch_interior_many(p1, p2, q1, q2))
    if len(hit) == 0:
        return None
    return tuple(map(int, g.edges[f[hit[0]]]))


# --------------------------------------------------------------------------
# independent sets


def is_independent(g: RggGraph, vertices) -> bool:
    vs = np.asarray(list(vertices), dtype=np.int64)
    if len(np.unique(vs)) != len(vs):
        return False
    chosen = np.zeros(g.n, dtype=bool)
    chosen[vs] = True
    return not (chosen[g.edges[:, 0]] & chosen[g.edges[:, 1]]).any()


def clique_cover_count(g: RggGraph) -> int:
    """Number of non-empty cells of diagonal r.

    Points sharing such a cell are pairwise adjacent, so no independent set
    is larger than this count.
    """
    return cover_cell_count(g.points, g.r)


def cover_cell_count(points: np.ndarray, r: float) -> int:
    """:func:`clique_cover_count` straight from the points.  The cell side
    is shrunk by a relative 1e-12 so rounding can never put two
    non-adjacent points in one cell."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return 0
    if r <= 0.0:
        return len(np.unique(pts, axis=0))
    side = r / math.sqrt(2.0) * (1.0 - 1e-12)
    # float cell indices: exact, and no int64 overflow for tiny r
    with np.errstate(over="ignore"):
        cells = np.floor(pts / side)
    if side <= 0.0 or not np.isfinite(cells).all():
        # coincident points are adjacent, so distinct points still bound it
        return len(np.unique(pts, axis=0))
    return len(np.unique(cells, axis=0))


def _mis_bitmask(nb: list[int]) -> int:
    """Maximum independent set of a small graph given neighbour bitmasks."""
    n = len(nb)
    closed = [nb[v] | (1 << v) for v in range(n)]
    best = [0, 0]

    def cover_bound(mask: int) -> int:
        count = 0
        while mask:
            v = (mask & -mask).bit_length() - 1
            clique = 1 << v
            cand = mask & nb[v]
            while cand:
                u = (cand & -cand).bit_length() - 1
                clique |= 1 << u
                cand &= nb[u]
            mask &= ~clique
            count += 1
        return count

    def rec(mask: int, cur: int, size: int) -> None:
        while True:
            if mask == 0:
                if size > best[0]:
                    best[0], best[1] = size, cur
                return
            # vertices of degree <= 1 are always safe to take
            m = mask
            took = False
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if (nb[v] & mask).bit_count() <= 1:
                    cur |= 1 << v
                    size += 1
                    mask &= ~closed[v]
                    took = True
                    break
            if not took:
                break
        if size + cover_bound(mask) <= best[0]:
            return
        m, v, dv = mask, -1, -1
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            du = (nb[u] & mask).bit_count()
            if du > dv:
                v, dv = u, du
        rec(mask & ~closed[v], cur | (1 << v), size + 1)
        rec(mask & ~(1 << v), cur, size)

    rec((1 << n) - 1, 0, 0)
    return best[1]


def max_independent_set_exact(g: RggGraph, vertices) -> list[int]:
    """Exact maximum independent set of the subgraph induced on ``vertices``
    (branch and bound on the maximum-degree vertex)."""
    vs = [int(v) for v in vertices]
    pos = {v: i for i, v in enumerate(vs)}
    nb = [0] * len(vs)
    for v in vs:
        for u in g.neighbors(v).tolist():
            if u in pos:
                nb[pos[v]] |= 1 << pos[u]
    best = _mis_bitmask(nb)
    return [vs[i] for i in range(len(vs)) if best >> i & 1]


def greedy_independent_set(g: RggGraph) -> list[int]:
    """Repeatedly take a minimum-degree vertex and delete its neighbourhood."""
    adj = _neighbor_sets(g)
    deg = [len(a) for a in adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * g.n
    out = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        out.append(v)
        removed[v] = True
        for u in adj[v]:
            if removed[u]:
                continue
            removed[u] = True
            for w in adj[u]:
                if not removed[w]:
                    deg[w] -= 1
                    heapq.heappush(heap, (deg[w], w))
    return sorted(out)


def grid_witness_is(g: RggGraph, k: int) -> list[int] | None:
    """Independent set of size k from a spaced grid of cells, or None.

    The square is cut into ``c = ceil(sqrt(k))`` periods per axis; each
    period holds a selected cell followed by a gap strip of width r, so
    points in different selected cells (wraparound included) are more than
    r apart.  When sqrt(k) is an integer and r = 1/(2 sqrt(k)) this is the
    checkerboard of every second row and column of a 2c x 2c grid.  One
    point (the lowest index) is returned from each of the first k occupied
    cells in row-major order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    limit = 1.0 / (2.0 * math.sqrt(k))
    if g.r > limit:
        raise RadiusTooLargeForGrid(f"r = {g.r} exceeds 1/(2 sqrt(k)) = {limit}")
    if k == 1:
        return [0] if g.n else None
    if g.n < k:
        return None
    c = math.isqrt(k)
    if c * c < k:
        c += 1
    period = 1.0 / c
    width = period - g.r
    col = np.minimum(np.floor(g.points / period).astype(np.int64), c - 1)
    offset = g.points - col * period
    inside = (offset < width).all(axis=1)
    idx = np.flatnonzero(inside)
    if len(idx) == 0:
        return None
    keys = col[idx, 0] * c + col[idx, 1]
    ukeys, first = np.unique(keys, return_index=True)
    if len(ukeys) < k:
        return None
    chosen = sorted(int(idx[i]) for i in first[:k])
    if not is_independent(g, chosen):
        return None  # only reachable through rounding at a cell boundary
    return chosen


def independent_k(g: RggGraph, k: int) -> TriStateDecision:
    """Decide whether ``g`` has an independent set of size ``k``.

    No: clique-cover bound below k, or every component is small enough for
    the exact solver and the summed maxima fall short.  Yes: exact solver,
    spaced-grid witness or greedy.  Otherwise Unknown(greedy, cover bound).
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k must satisfy 1 <= k <= n = {g.n}, got {k}")
    cover = clique_cover_count(g)
    if cover < k:
        return TriStateDecision.no(kind="clique-cover", nonempty_cells=cover, cell_diagonal=g.r)
    comps = components(g)
    if max(len(c) for c in comps) <= MIS_EXACT_CAP:
        mis = []
        for comp in comps:
            mis.extend(max_independent_set_exact(g, comp) if len(comp) > 1 else comp.tolist())
        if len(mis) >= k:
            return TriStateDecision.yes(sorted(mis)[:k])
        return TriStateDecision.no(kind="exact", maximum=len(mis))
    if g.r <= 1.0 / (2.0 * math.sqrt(k)):
        wit = grid_witness_is(g, k)
        if wit is not None:
            return TriStateDecision.yes(wit)
    greedy = greedy_independent_set(g)
    if len(greedy) >= k:
        return TriStateDecision.yes(greedy[:k])
    # exact on the small components, greedy on the rest
    mixed = []
    big = []
    for comp in comps:
        if len(comp) <= MIS_EXACT_CAP:
            mixed.extend(max_independent_set_exact(g, comp) if len(comp) > 1 else comp.tolist())
        else:
            big.append(comp)
    if big:
        sub_greedy = set(greedy)
        for comp in big:
            mixed.extend(v for v in comp.tolist() if v in sub_greedy)
    if len(mixed) >= k and is_independent(g, mixed[:k]):
        return TriStateDecision.yes(sorted(mixed)[:k])
    lower = max(len(greedy), len(mixed))
    return TriStateDecision.unknown(min(lower, cover), cover)


# --------------------------------------------------------------------------
# nine sub-square occupancy


def nine_subsquare_occupancy(g: RggGraph) -> float:
    """Fraction of occupied sub-squares when every complete square of
    diagonal r is split into a 3x3 block of sub-squares."""
    return subsquare_occupancy(g.points, g.r)


def subsquare_occupancy(points, r: float) -> float:
    """:func:`nine_subsquare_occupancy` straight from the points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0 or r <= 0.0:
        return 0.0
    side = r / math.sqrt(2.0)
    m = int(math.floor(1.0 / side))
    if m == 0:
        return 0.0
    sub = side / 3.0
    inside = (pts < m * side).all(axis=1)
    cells = np.floor(pts[inside] / sub).astype(np.int64)
    np.clip(cells, 0, 3 * m - 1, out=cells)
    occupied = len(np.unique(cells, axis=0)) if len(cells) else 0
    return occupied / (9 * m * m)


# --------------------------------------------------------------------------
# dispatch


def evaluate(g: RggGraph, p: Property):
    """Boolean for every property except IndependentK, which returns a
    :class:`TriStateDecision`."""
    if p.k is not None and p.k > g.n:
        raise ValueError(f"{p} needs k <= n = {g.n}")
    kind = p.kind
    if kind is Kind.HAS_EDGE:
        return has_edge(g)
    if kind is Kind.CONNECTED_K:
        return has_connected_k(g, p.k)
    if kind is Kind.CLIQUE_K:
        return has_clique_k(g, p.k).is_yes
    if kind is Kind.PLANE:
        return is_plane(g)
    if kind is Kind.PLANAR:
        return is_planar(g)
    if kind is Kind.HAS_FREE_EDGE:
        return has_free_edge(g)
    if kind is Kind.ALL_EDGES_FREE:
        return all_edges_free(g)
    if kind is Kind.INDEPENDENT_K:
        return independent_k(g, p.k)
    raise ValueError(f"unhandled property {p}")


def outcome(value) -> bool | None:
    """Collapse an evaluate() result to True / False / None (unknown)."""
    if isinstance(value, TriStateDecision):
        return None if value.is_unknown else value.is_yes
    return bool(value)
