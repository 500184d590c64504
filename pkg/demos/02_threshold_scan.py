"""Probability curves and empirical thresholds.

Sweeps P(triangle) over a log grid of radii, locates the 50% radius with
bisection and fits ln r* against ln n.  Sizes are kept small so this runs in
about a minute; the exponent recipes use n up to 2^15 and 400 trials.
"""

import math

from rggthresh import montecarlo as mc
from rggthresh.properties import PLANE, clique_k

n = 2000
rows = mc.sweep(n, clique_k(3), mc.log_grid(2e-3, 2e-2, 7), trials=60, master_seed=1)
for row in rows:
    bar = "#" * int(40 * row.p_hat)
    print(f"r={row.r:.4f}  p={row.p_hat:.2f} [{row.ci_lo:.2f},{row.ci_hi:.2f}] {bar}")

points = []
for n in (500, 1000, 2000, 4000):
    est = mc.locate_threshold(n, clique_k(3), trials_per_probe=100, master_seed=1)
    points.append((n, est.r_star))
    print(f"n={n:5d}  r*={est.r_star:.5f}  n^-3/4={n ** -0.75:.5f}  probes={len(est.probes)}")

fit = mc.fit_exponent(points)
print(f"triangle slope {fit.slope:.3f} +- {fit.stderr_slope:.3f} (theory -0.75)")

# decreasing properties cross 50% from above
est = mc.locate_threshold(2000, PLANE, trials_per_probe=100, master_seed=1)
print(f"plane r* at n=2000: {est.r_star:.5f}, n^-2/3 = {2000 ** (-2 / 3):.5f}")

mean, var = mc.crossing_moments(1000, 0.02, trials=30, master_seed=1)
print(f"crossings at n=1000, r=0.02: mean {mean:.1f}, var {var:.1f}, n^4 r^6 = {1000**4 * 0.02**6:.1f}")
