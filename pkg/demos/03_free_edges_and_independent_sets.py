"""Free edges, long edges and independent sets on the torus."""

import math

import numpy as np

from rggthresh import detectors as det
from rggthresh.graph import GraphConfig, generate, trial_seed, uniform_points
from rggthresh.recipes import is_lower_radius

n = 3000
for label, r in (("sparse", n**-0.9), ("all free", n**-0.8), ("some free", n**-0.58), ("dense", 0.08)):
    g = generate(GraphConfig(n, r, "torus", seed=3))
    mask = det.free_edge_mask(g)
    print(f"{label:9s} r={r:.5f} edges={g.m:6d} free={int(mask.sum()):6d}")

# long edges are crossed: find who crosses a few of them
g = generate(GraphConfig(n, 0.15, "torus", seed=4))
cut = det.long_edge_cutoff(n)
long_ids = np.flatnonzero(g.lengths >= cut)
print(f"\n{len(long_ids)} long edges (>= {cut:.4f}) out of {g.m}")
for eid in long_ids[:5].tolist():
    print("  edge", tuple(g.edges[eid].tolist()), "crossed by", det.edge_crossed_by(g, eid))

# independent sets: exact on small components, grid witness, clique cover
g = generate(GraphConfig(40, 0.12, "torus", seed=5))
print("\nn=40:", det.independent_k(g, 10).to_json())
k = 100
g = generate(GraphConfig(5000, 1 / (2 * math.sqrt(k)), "torus", seed=6))
wit = det.grid_witness_is(g, k)
print(f"grid witness for k={k}:", None if wit is None else f"{len(wit)} points, independent={det.is_independent(g, wit)}")

# the certified No only needs the points, not the graph
r = is_lower_radius()
cells = det.cover_cell_count(uniform_points(10_000, trial_seed(1, 0)), r)
print(f"r={r:.4f}: at most {cells} pairwise non-adjacent points, so no independent set of size 1000")
