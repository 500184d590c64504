"""A first random geometric graph: build it, look at its edges, crossings
and anchors, then save and reload it."""

import numpy as np

from rggthresh import detectors as det
from rggthresh.graph import GraphConfig, dumps_points, generate, components
from rggthresh.properties import PLANE, PLANAR, clique_k

n, r = 400, 0.06
g = generate(GraphConfig(n, r, "square", seed=7))
print(f"n={g.n} r={g.r} edges={g.m} mean degree={2 * g.m / g.n:.2f}")

sizes = sorted((len(c) for c in components(g)), reverse=True)
print("largest components:", sizes[:5])

# crossings come from a two-hop join, so only nearby edge pairs are tested
pairs = det.crossing_pairs(g)
print("crossings:", len(pairs))
if pairs:
    p = pairs[0]
    print("first crossing", p.e1, p.e2, det.crossing_invariants(g, p))

a = det.find_anchor(g)
print("anchor:", a)
print("plane:", det.evaluate(g, PLANE), " planar:", det.evaluate(g, PLANAR))
print("triangle:", det.has_clique_k(g, 3).witness, " 4-clique:", det.evaluate(g, clique_k(4)))

# the same points at a smaller radius: edge sets are nested
small = generate(GraphConfig(n, 0.02, "square", seed=7))
assert np.array_equal(small.points, g.points)
print("at r=0.02:", small.m, "edges, plane =", det.is_plane(small))

text = dumps_points(g.points, g.r, g.metric, comments=["demo graph"])
print(text.splitlines()[0], "...", len(text.splitlines()), "lines")
