"""Per-point-set critical radii of monotone properties.

For fixed points the edge sets are nested in r, so a monotone property
switches exactly once, at the length of some edge.  ``critical_radius``
returns that switching length:

* increasing properties hold at r  iff  r >= critical radius;
* decreasing properties hold at r  iff  r <  critical radius.

The search doubles a radius R until the switch has happened in G(R), finds
the components of G(R) where it happened, and bisects over each such
component's sorted edge lengths.  Every property handled here is decided
inside single components (a crossing pair spans a connected four-point
set), so the smallest component-local switch is the global one.
"""

from __future__ import annotations

import math

import networkx as nx
import numpy as np

from .detectors import (
    _crossing_array,
    _extend_clique,
    _neighbor_sets,
    _nx_component,
    degeneracy_order,
    find_clique,
    is_planar,
    is_plane,
)
from .geometry import TORUS_MAX_LENGTH, Metric
from .graph import RggGraph, component_labels, from_points
from .properties import Kind, Property

SUPPORTED = {Kind.HAS_EDGE, Kind.CONNECTED_K, Kind.CLIQUE_K, Kind.PLANE, Kind.PLANAR}


def supports(p: Property) -> bool:
    return p.kind in SUPPORTED


def max_radius(metric: Metric) -> float:
    if metric is Metric.TORUS:
        return math.nextafter(TORUS_MAX_LENGTH, 0.0)
    return math.sqrt(2.0)


def _min_size(p: Property) -> tuple[int, int]:
    """Fewest vertices and edges a component needs to switch."""
    if p.kind is Kind.HAS_EDGE:
        return 2, 1
    if p.kind is Kind.CONNECTED_K:
        return p.k, p.k - 1
    if p.kind is Kind.CLIQUE_K:
        return p.k, p.k * (p.k - 1) // 2
    if p.kind is Kind.PLANE:
        return 4, 4  # triangle plus the crossing edge
    return 5, 9  # K3,3 has 9 edges, K5 has 10


def _switched(g: RggGraph, p: Property) -> bool:
    """Has the property switched state (appeared / disappeared) in g?"""
    if p.kind is Kind.CLIQUE_K:
        return find_clique(g, p.k) is not None
    if p.kind is Kind.PLANE:
        return not is_plane(g)
    if p.kind is Kind.PLANAR:
        return not is_planar(g)
    raise ValueError(p)


def _kruskal_connected(g: RggGraph, k: int) -> float:
    """Length of the edge whose addition first creates a component of
    size >= k (edges of ``g`` added in length order)."""
    parent = list(range(g.n))
    size = [1] * g.n

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    order = np.argsort(g.lengths, kind="stable")
    for e in order.tolist():
        a, b = find(int(g.edges[e, 0])), find(int(g.edges[e, 1]))
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
        if size[a] >= k:
            return float(g.lengths[e])
    return math.inf


def _members(labels: np.ndarray, wanted: np.ndarray) -> list[np.ndarray]:
    order = np.argsort(labels, kind="stable")
    sl = labels[order]
    lo = np.searchsorted(sl, wanted, side="left")
    hi = np.searchsorted(sl, wanted, side="right")
    return [np.sort(order[a:b]) for a, b in zip(lo.tolist(), hi.tolist())]


def _switched_components(g: RggGraph, p: Property, comps: list[np.ndarray]) -> list[np.ndarray]:
    if p.kind is Kind.PLANE:
        cross = _crossing_array(g, stop_at_first=False)
        if len(cross) == 0:
            return []
        labels = component_labels(g)
        hit = set(labels[g.edges[cross[:, 0], 0]].tolist())
        return [c for c in comps if labels[c[0]] in hit]
    out = []
    if p.kind is Kind.CLIQUE_K:
        adj = _neighbor_sets(g)
        for comp in comps:
            core = _core_within(adj, comp, p.k - 1)
            order = degeneracy_order(adj, core)
            rank = {v: i for i, v in enumerate(order)}
            for v in order:
                later = sorted((u for u in adj[v] if u in rank and rank[u] > rank[v]), key=rank.__getitem__)
                if len(later) >= p.k - 1 and _extend_clique(adj, [v], later, p.k):
                    out.append(comp)
                    break
        return out
    # planar
    for comp in comps:
        G = _nx_component(g, comp)
        if G.number_of_edges() > 3 * len(comp) - 6 or not nx.check_planarity(G)[0]:
            out.append(comp)
    return out


def _core_within(adj, comp, min_deg):
    cs = set(comp.tolist())
    sub = {v: adj[v] & cs for v in cs}
    deg = {v: len(s) for v, s in sub.items()}
    stack = [v for v, d in deg.items() if d < min_deg]
    alive = set(cs)
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u in sub[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] < min_deg:
                    stack.append(u)
    return alive


def _local_switch(points: np.ndarray, lengths: np.ndarray, p: Property, metric: Metric, best: float) -> float:
    """Smallest edge length at which a component that has switched at its
    largest edge length switches, or inf if not below ``best``."""
    cand = np.unique(lengths)
    if len(cand) == 0 or cand[0] >= best:
        return math.inf
    over = cand >= best
    if over.any():
        # is the switch already present strictly below best?
        top = int(np.argmax(over)) - 1
        if not _switched(from_points(points, float(cand[top]), metric), p):
            return math.inf
        cand = cand[: top + 1]
    lo, hi = -1, len(cand) - 1  # switched at cand[hi], not at cand[lo]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _switched(from_points(points, float(cand[mid]), metric), p):
            hi = mid
        else:
            lo = mid
    return float(cand[hi])


def critical_radius(points, p: Property, metric: Metric | str = Metric.SQUARE, start: float | None = None) -> float:
    """Radius at which ``p`` switches for this point set (inf if never
    within the admissible radius range)."""
    metric = Metric.parse(metric)
    if not supports(p):
        raise ValueError(f"no critical radius for {p}")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    vmin, emin = _min_size(p)
    if n < vmin:
        return math.inf
    r_max = max_radius(metric)
    R = min(start if start is not None else 1.0 / n, r_max)
    while True:
        g = from_points(pts, R, metric)
        if g.m >= emin:
            labels = component_labels(g)
            sizes = np.bincount(labels)
            ecount = np.bincount(labels[g.edges[:, 0]], minlength=len(sizes))
            wanted = np.flatnonzero((sizes >= vmin) & (ecount >= emin))
            if len(wanted):
                if p.kind is Kind.HAS_EDGE:
                    return float(g.lengths.min())
                if p.kind is Kind.CONNECTED_K:
                    return _kruskal_connected(g, p.k)
                comps = _switched_components(g, p, _members(labels, wanted))
                best = math.inf
                for comp in comps:
                    inside = np.zeros(n, dtype=bool)
                    inside[comp] = True
                    lens = g.lengths[inside[g.edges[:, 0]]]
                    best = min(best, _local_switch(g.points[comp], lens, p, metric, best))
                if best < math.inf:
                    return best
        if R >= r_max:
            return math.inf
        R = min(2.0 * R, r_max)


def holds_at(crit: float, r: float, p: Property) -> bool:
    """Property state at radius r given the critical radius."""
    if p.direction == "increasing":
        return crit <= r
    return r < crit
