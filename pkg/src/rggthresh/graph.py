"""Random geometric graphs G(n, r): seeded generation, grid-bucketed
adjacency, connected components and the point-set text format.

Seeding
-------
Trial ``i`` of an experiment with master seed ``s`` draws its points from
``numpy.random.PCG64(trial_seed(s, i))`` where ``trial_seed`` applies the
splitmix64 finalizer twice.  Coordinates come from ``Generator.random``,
i.e. ``(next_uint64 >> 11) * 2**-53``, drawn x then y for each point.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import PointFileError, TorusRadiusTooLarge
from .geometry import TORUS_MAX_LENGTH, Metric, pair_distances

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Per-trial seed mixed from (master_seed, trial_index)."""
    return splitmix64(splitmix64(master_seed & MASK64) ^ (trial_index & MASK64))


def uniform_points(n: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed & MASK64))
    return rng.random((n, 2))


@dataclass(frozen=True)
class GraphConfig:
    n: int
    r: float
    metric: Metric = Metric.SQUARE
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "metric", Metric.parse(self.metric))
        object.__setattr__(self, "r", float(self.r))
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not (self.r >= 0.0) or math.isinf(self.r):
            raise ValueError(f"radius must be finite and >= 0, got {self.r}")
        if self.metric is Metric.TORUS and self.r >= TORUS_MAX_LENGTH:
            raise TorusRadiusTooLarge(f"torus radius {self.r} must be < 1/4")
        if self.seed is not None and not (0 <= self.seed <= MASK64):
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class GridIndex:
    """Points bucketed into square cells of side ``cell_size``.

    ``order`` lists vertex indices sorted by cell key; cell ``keys[c]`` holds
    ``order[starts[c]:starts[c] + counts[c]]``.  Under the torus the side is
    ``1 / floor(1 / r)`` so that cells tile the period exactly.
    """

    cell_size: float
    ncells: int
    keys: np.ndarray
    starts: np.ndarray
    counts: np.ndarray
    order: np.ndarray
    point_keys: np.ndarray

    @cached_property
    def cells(self) -> dict[tuple[int, int], list[int]]:
        out = {}
        for key, s, c in zip(self.keys.tolist(), self.starts.tolist(), self.counts.tolist()):
            out[divmod(key, self.ncells)] = sorted(self.order[s : s + c].tolist())
        return out

    def cell_of(self, i: int) -> tuple[int, int]:
        return divmod(int(self.point_keys[i]), self.ncells)


_MAX_CELLS = 1 << 24  # keeps cell keys well inside int64


def build_grid(points: np.ndarray, r: float, metric: Metric) -> GridIndex:
    if r <= 0.0:
        ncells, cell = 1, 1.0
    elif metric is Metric.TORUS:
        ncells = max(1, min(_MAX_CELLS, int(math.floor(1.0 / r))))
        cell = 1.0 / ncells
    else:
        # cells wider than r are still correct, just coarser
        cell = max(r, 1.0 / _MAX_CELLS)
        ncells = max(1, int(math.ceil(1.0 / cell)))
    if len(points):
        c = np.floor(points / cell).astype(np.int64)
        np.clip(c, 0, ncells - 1, out=c)
        point_keys = c[:, 0] * ncells + c[:, 1]
    else:
        point_keys = np.zeros(0, dtype=np.int64)
    order = np.argsort(point_keys, kind="stable")
    keys, starts, counts = np.unique(point_keys[order], return_index=True, return_counts=True)
    return GridIndex(cell, ncells, keys, starts, counts, order, point_keys)


# half of the 3x3 neighbourhood; the rest is covered by symmetry
_HALF_OFFSETS = ((0, 0), (1, -1), (1, 0), (1, 1), (0, 1))


def _grid_pairs(points: np.ndarray, r: float, metric: Metric, grid: GridIndex):
    n = len(points)
    if n < 2:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    if r <= 0.0:
        return _coincident_pairs(points)
    nc = grid.ncells
    cx, cy = np.divmod(grid.point_keys, nc)
    ii_all, jj_all = [], []
    for ox, oy in _HALF_OFFSETS:
        nx, ny = cx + ox, cy + oy
        if metric is Metric.TORUS:
            nx %= nc
            ny %= nc
            valid = np.ones(n, dtype=bool)
        else:
            valid = (nx >= 0) & (nx < nc) & (ny >= 0) & (ny < nc)
        nk = nx * nc + ny
        pos = np.searchsorted(grid.keys, nk)
        pos = np.minimum(pos, len(grid.keys) - 1)
        found = valid & (grid.keys[pos] == nk)
        cnt = np.where(found, grid.counts[pos], 0)
        total = int(cnt.sum())
        if total == 0:
            continue
        ii = np.repeat(np.arange(n), cnt)
        first = np.repeat(grid.starts[pos], cnt)
        within = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        jj = grid.order[first + within]
        if (ox, oy) == (0, 0):
            keep = ii < jj
            ii, jj = ii[keep], jj[keep]
        ii_all.append(ii)
        jj_all.append(jj)
    if not ii_all:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    ii = np.concatenate(ii_all)
    jj = np.concatenate(jj_all)
    d = pair_distances(points[ii], points[jj], metric)
    keep = d <= r
    ii, jj, d = ii[keep], jj[keep], d[keep]
    lo, hi = np.minimum(ii, jj), np.maximum(ii, jj)
    return lo, hi, d


def _coincident_pairs(points: np.ndarray):
    _, inv = np.unique(points, axis=0, return_inverse=True)
    inv = inv.ravel()
    lo, hi = [], []
    for g in np.unique(inv):
        members = np.flatnonzero(inv == g)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                lo.append(members[a])
                hi.append(members[b])
    lo = np.array(lo, dtype=np.int64)
    return lo, np.array(hi, dtype=np.int64), np.zeros(len(lo))


def brute_force_edges(points: np.ndarray, r: float, metric: Metric | str) -> np.ndarray:
    """All pairs i < j at distance <= r, by checking every pair."""
    metric = Metric.parse(metric)
    n = len(points)
    ii, jj = np.triu_indices(n, k=1)
    d = pair_distances(points[ii], points[jj], metric)
    keep = d <= r
    return np.stack([ii[keep], jj[keep]], axis=1).astype(np.int64)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RggGraph:
    """Immutable geometric graph on points of [0, 1)^2.

    ``edges`` is an ``(m, 2)`` array of index pairs ``i < j`` sorted
    lexicographically with matching ``lengths``; adjacency is stored in CSR
    form (``indptr``, ``indices``) with sorted neighbour lists.
    """

    config: GraphConfig
    points: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    grid: GridIndex = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def r(self) -> float:
        return self.config.r

    @property
    def metric(self) -> Metric:
        return self.config.metric

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i).tolist() for i in range(self.n)]

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(map(tuple, self.edges.tolist()))

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        nb = self.neighbors(i)
        k = np.searchsorted(nb, j)
        return bool(k < len(nb) and nb[k] == j)

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: k for k, e in enumerate(map(tuple, self.edges.tolist()))}

    def check_consistency(self) -> bool:
        """Edges and adjacency describe the same symmetric relation."""
        from_adj = {(i, j) for i in range(self.n) for j in self.adjacency[i] if i < j}
        sym = all(i in self.adjacency[j] for i in range(self.n) for j in self.adjacency[i])
        return sym and from_adj == set(self.edge_set)

    def csr(self) -> csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def subgraph_points(self, vertices) -> np.ndarray:
        return self.points[np.asarray(vertices, dtype=np.int64)]


def _assemble(config: GraphConfig, points: np.ndarray) -> RggGraph:
    points = np.ascontiguousarray(points, dtype=float).reshape(-1, 2)
    grid = build_grid(points, config.r, config.metric)
    lo, hi, d = _grid_pairs(points, config.r, config.metric, grid)
    order = np.lexsort((hi, lo))
    lo, hi, d = lo[order], hi[order], d[order]
    edges = np.stack([lo, hi], axis=1).astype(np.int64).reshape(-1, 2)
    n = len(points)
    rows = np.concatenate([lo, hi])
    cols = np.concatenate([hi, lo])
    o = np.lexsort((cols, rows))
    rows, cols = rows[o], cols[o]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return RggGraph(
        config=config,
        points=_readonly(points),
        edges=_readonly(edges),
        lengths=_readonly(np.asarray(d, dtype=float)),
        indptr=_readonly(indptr),
        indices=_readonly(cols.astype(np.int64)),
        grid=grid,
    )


def generate(config: GraphConfig) -> RggGraph:
    """Sample G(n, r) with the seed stored in ``config``."""
    if config.seed is None:
        raise ValueError("generate() needs a seeded GraphConfig")
    return _assemble(config, uniform_points(config.n, config.seed))


def from_points(points, r: float, metric: Metric | str = Metric.SQUARE) -> RggGraph:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) and not ((pts >= 0.0).all() and (pts < 1.0).all()):
        raise ValueError("points must lie in [0, 1)^2")
    return _assemble(GraphConfig(len(pts), r, metric), pts)


def with_radius(g: RggGraph, r: float) -> RggGraph:
    """Same points, different radius (edges are nested in r)."""
    cfg = GraphConfig(g.n, r, g.metric, g.config.seed)
    return _assemble(cfg, np.array(g.points))


# --------------------------------------------------------------------------
# connectivity


def components(g: RggGraph) -> list[np.ndarray]:
    """Connected components as sorted index arrays, ordered by smallest
    member."""
    if g.n == 0:
        return []
    labels = component_labels(g)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    starts = np.concatenate([[0], bounds]).tolist()
    ends = np.concatenate([bounds, [g.n]]).tolist()
    groups = [order[s:e] for s, e in zip(starts, ends)]
    groups.sort(key=lambda a: int(a[0]))
    return groups


def component_labels(g: RggGraph) -> np.ndarray:
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    return connected_components(g.csr(), directed=False)[1]


def max_component_size(g: RggGraph) -> int:
    if g.n == 0:
        return 0
    return int(np.bincount(component_labels(g)).max())


# --------------------------------------------------------------------------
# point-set files


def write_points(dest, points, r: float, metric: Metric | str, comments: Iterable[str] = ()) -> None:
    """Write the ``rggpts`` text format.

    Coordinates carry 17 significant digits, which round-trips every
    float64 exactly.  ``comments`` are appended as trailing ``#`` lines.
    """
    metric = Metric.parse(metric)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    lines = [f"rggpts 1 {len(pts)} {float(r)!r} {metric.value}"]
    lines += [f"{x:.16e} {y:.16e}" for x, y in pts.tolist()]
    lines += [f"# {c}" for c in comments]
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)


def read_points(src) -> tuple[np.ndarray, float, Metric]:
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="ascii") as fh:
            text = fh.read()
    else:
        text = src.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise PointFileError("empty point file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "rggpts" or head[1] != "1":
        raise PointFileError(f"bad header: {lines[0]!r}")
    try:
        n = int(head[2])
        r = float(head[3])
        metric = Metric.parse(head[4])
    except ValueError as exc:
        raise PointFileError(f"bad header: {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != n:
        raise PointFileError(f"header announces {n} points, found {len(body)}")
    try:
        pts = np.array([[float(t) for t in ln.split()] for ln in body], dtype=float).reshape(-1, 2)
    except ValueError as exc:
        raise PointFileError("malformed coordinate line") from exc
    return pts, r, metric


def load_graph(src) -> RggGraph:
    pts, r, metric = read_points(src)
    return from_points(pts, r, metric)


def dumps_points(points, r, metric, comments=()) -> str:
    buf = io.StringIO()
    write_points(buf, points, r, metric, comments)
    return buf.getvalue()
