import math
import warnings
import zlib

import numpy as np
import pytest

from rggthresh import montecarlo as mc
from rggthresh.critical import critical_radius, holds_at
from rggthresh.detectors import evaluate, outcome
from rggthresh.errors import BracketNotFound, InsufficientPoints, NonMonotoneProperty
from rggthresh.graph import GraphConfig, from_points, generate, trial_seed, uniform_points
from rggthresh.properties import (
    ALL_EDGES_FREE,
    HAS_EDGE,
    HAS_FREE_EDGE,
    PLANAR,
    PLANE,
    TriStateDecision,
    clique_k,
    connected_k,
    independent_k,
)


def test_wilson_interval_coverage():
    rng = np.random.default_rng(0)
    for trials in (50, 400):
        for p in (0.05, 0.3, 0.5, 0.9):
            draws = rng.binomial(trials, p, size=2000)
            covered = 0
            for s in draws.tolist():
                lo, hi = mc.wilson_interval(s, trials)
                assert 0 <= lo <= s / trials <= hi <= 1
                covered += lo <= p <= hi
            assert covered / len(draws) >= 0.93


def test_wilson_interval_edges():
    assert mc.wilson_interval(0, 0) == (0.0, 1.0)
    lo, hi = mc.wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = mc.wilson_interval(100, 100)
    assert hi == 1.0 and 0.95 < lo < 1


def test_has_edge_extremes():
    assert mc.estimate(50, 0.0, HAS_EDGE, 20, 1).p_hat == 0.0
    row = mc.estimate(50, math.sqrt(2), HAS_EDGE, 20, 1)
    assert row.p_hat == 1.0 and row.successes == 20


def test_has_edge_matches_pairwise_formula():
    # on the torus a pair is adjacent with probability pi r^2; the pair
    # indicators are only weakly dependent, and the no-edge probability is
    # 1 - (1 - pi r^2)^(n(n-1)/2) up to O(r) corrections
    n, r, trials = 1000, 1e-3, 2000
    want = 1 - (1 - math.pi * r * r) ** (n * (n - 1) / 2)
    row = mc.estimate(n, r, HAS_EDGE, trials, 5, "torus")
    sd = math.sqrt(want * (1 - want) / trials)
    assert abs(row.p_hat - want) <= 4 * sd
    assert 0.05 < row.p_hat < 0.95


def test_estimate_reuses_point_sets_across_radii():
    n = 80
    for i in range(5):
        g1 = generate(GraphConfig(n, 0.05, "square", trial_seed(3, i)))
        g2 = generate(GraphConfig(n, 0.15, "square", trial_seed(3, i)))
        assert np.array_equal(g1.points, g2.points)


def test_sweep_empty_grid_and_monotone_rows():
    assert mc.sweep(100, HAS_EDGE, [], 10, 0) == []
    rows = mc.sweep(200, clique_k(3), mc.log_grid(0.005, 0.2, 8), 60, 2)
    ps = [row.p_hat for row in rows]
    assert ps == sorted(ps)
    assert ps[0] < 0.5 < ps[-1]


def test_sweep_plane_decreasing():
    rows = mc.sweep(200, PLANE, mc.log_grid(0.005, 0.2, 8), 60, 2)
    ps = [row.p_hat for row in rows]
    assert ps == sorted(ps, reverse=True)


def test_has_free_edge_rises_from_sparse_regime():
    n = 10_000
    rows = mc.sweep(n, HAS_FREE_EDGE, [1e-5, n**-0.8], 40, 9, "torus")
    assert rows[0].p_hat < 0.2 and rows[1].p_hat > 0.9


def test_locate_threshold_has_edge():
    n = 10_000
    est = mc.locate_threshold(n, HAS_EDGE, trials_per_probe=200, master_seed=1)
    assert 0.5 / n <= est.r_star <= 2 / n
    lo, hi = est.bracket
    assert lo <= est.r_star <= hi and hi - lo <= 0.01 * est.r_star


def test_locate_threshold_triangle():
    n = 10_000
    est = mc.locate_threshold(n, clique_k(3), trials_per_probe=100, master_seed=1)
    assert 0.5 * n**-0.75 <= est.r_star <= 2 * n**-0.75


def test_locate_threshold_errors():
    with pytest.raises(NonMonotoneProperty):
        mc.locate_threshold(100, HAS_FREE_EDGE)
    with pytest.raises(NonMonotoneProperty):
        mc.locate_threshold(100, ALL_EDGES_FREE)
    with pytest.raises(BracketNotFound):
        mc.locate_threshold(200, HAS_EDGE, trials_per_probe=20, bracket=(0.5, 1.0))
    with pytest.raises(ValueError):
        mc.locate_threshold(200, HAS_EDGE, bracket=(0.0, 1.0))


def test_threshold_without_critical_radii():
    # independent-k has no critical-radius shortcut, so probes go through estimate()
    # n below the exact cap keeps every trial decided
    est = mc.locate_threshold(40, independent_k(12), trials_per_probe=20, tolerance=0.05, master_seed=4)
    row_lo = mc.estimate(40, est.bracket[0], independent_k(12), 20, 4)
    row_hi = mc.estimate(40, est.bracket[1], independent_k(12), 20, 4)
    assert row_lo.unknown_count == row_hi.unknown_count == 0
    assert row_lo.p_hat >= 0.5 > row_hi.p_hat


@pytest.mark.parametrize(
    "prop", [HAS_EDGE, connected_k(3), connected_k(4), clique_k(3), clique_k(4), PLANE, PLANAR], ids=str
)
def test_critical_radius_matches_direct_evaluation(prop):
    rng = np.random.default_rng(zlib.crc32(str(prop).encode()))
    for seed in range(25):
        pts = uniform_points(60, seed)
        crit = critical_radius(pts, prop)
        g0 = from_points(pts, 0.0)
        lengths = np.unique(from_points(pts, math.sqrt(2)).lengths)
        probes = list(rng.choice(lengths, 6)) + [0.0, math.sqrt(2)]
        if math.isfinite(crit):
            probes += [crit, math.nextafter(crit, 0)]
        for r in probes:
            assert holds_at(crit, r, prop) == outcome(evaluate(from_points(pts, float(r)), prop))
        assert g0.m == 0


def test_probes_from_critical_radii_equal_estimate():
    n, trials, seed = 300, 40, 6
    for prop in (clique_k(3), PLANE, connected_k(4)):
        crits = mc.critical_radii(n, prop, trials, seed)
        for r in (0.01, 0.03, 0.06):
            a = mc.row_from_critical(n, r, prop, crits, seed, "square")
            b = mc.estimate(n, r, prop, trials, seed)
            assert a == b


def test_threshold_from_radii_matches_locate():
    n = 500
    crits = mc.critical_radii(n, clique_k(3), 60, 3)
    a = mc.threshold_from_radii(n, clique_k(3), crits, master_seed=3)
    b = mc.locate_threshold(n, clique_k(3), trials_per_probe=60, master_seed=3)
    assert a.r_star == b.r_star and a.probes == b.probes


def test_fit_recovers_exact_slope():
    pts = [(n, 3.0 * n ** (-2 / 3)) for n in (2**10, 2**11, 2**12, 2**13)]
    fit = mc.fit_exponent(pts)
    assert fit.slope == pytest.approx(-2 / 3, abs=1e-12)
    assert math.exp(fit.intercept) == pytest.approx(3.0)
    assert fit.stderr_slope == pytest.approx(0, abs=1e-10)
    fit = mc.fit_exponent([(n, 0.7 / n) for n in (100, 1000, 10_000)])
    assert fit.slope == pytest.approx(-1, abs=1e-12)


def test_fit_needs_three_distinct_points():
    with pytest.raises(InsufficientPoints):
        mc.fit_exponent([(10, 0.1), (100, 0.01)])
    with pytest.raises(InsufficientPoints):
        mc.fit_exponent([(10, 0.1), (10, 0.2), (100, 0.01)])


def test_crossing_moments():
    mean, var = mc.crossing_moments(500, 1e-4, 20, 1)
    assert mean == 0 and var == 0
    counts = mc.crossing_counts(500, 0.05, 20, 1)
    assert counts.dtype == np.int64 and (counts > 0).all()


def test_unknown_outcomes_are_excluded(monkeypatch):
    # every third trial undecided
    def fake(i, **kw):
        return None if i % 3 == 0 else bool(i % 2)

    monkeypatch.setattr(mc, "_trial_outcome", fake)
    row = mc.estimate(10, 0.1, independent_k(2), 30, 0)
    assert row.unknown_count == 10
    assert row.successes == sum(1 for i in range(30) if i % 3 and i % 2)
    assert row.p_hat == row.successes / 20
    assert row.failures == 20 - row.successes
    with pytest.warns(mc.UnknownRateWarning):
        rows = mc.sweep(10, independent_k(2), [0.1, 0.2, 0.3], 30, 0)
    assert len(rows) == 1


def test_low_unknown_rate_does_not_abort(monkeypatch):
    monkeypatch.setattr(mc, "_trial_outcome", lambda i, **kw: None if i == 0 else True)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rows = mc.sweep(10, independent_k(2), [0.1, 0.2], 30, 0)
    assert len(rows) == 2 and rows[0].p_hat == 1.0


def test_outcome_of_tristate():
    assert outcome(TriStateDecision.yes([1, 2])) is True
    assert outcome(TriStateDecision.no(kind="x")) is False
    assert outcome(TriStateDecision.unknown(1, 3)) is None


def test_worker_count_does_not_change_results():
    a = mc.sweep(300, PLANE, [0.02, 0.05], 12, 8, workers=1)
    b = mc.sweep(300, PLANE, [0.02, 0.05], 12, 8, workers=2)
    assert mc.rows_to_csv(a) == mc.rows_to_csv(b)
    assert np.array_equal(mc.critical_radii(300, clique_k(3), 12, 8, workers=1),
                          mc.critical_radii(300, clique_k(3), 12, 8, workers=2))


def test_env_sets_default_workers(monkeypatch):
    monkeypatch.setenv("RGG_THREADS", "3")
    assert mc.default_workers() == 3
    monkeypatch.setenv("RGG_THREADS", "junk")
    assert mc.default_workers() == 1


def test_csv_round_trip():
    rows = mc.sweep(100, clique_k(3), [0.05, 0.1], 10, 1)
    text = mc.rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(mc.CSV_HEADER)
    back = mc.rows_from_csv("# comment\n" + text)
    assert [float(b["r"]) for b in back] == [0.05, 0.1]
    assert all(b["property"] == "clique-k" and b["k"] == "3" for b in back)
    assert [float(b["p_hat"]) for b in back] == [row.p_hat for row in rows]
