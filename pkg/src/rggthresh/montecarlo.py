"""Monte Carlo estimation of property probabilities, threshold location and
power-law exponent fits.

Trial ``i`` always uses the point set drawn from ``trial_seed(master_seed,
i)``, whatever the radius.  Sweeps at fixed n therefore reuse one point set
per trial across radii, and since edge sets are nested the per-trial
outcome of a monotone property is monotone in r.

Work is split over ``workers`` processes (default: ``RGG_THREADS`` or 1);
results are merged by trial index, so the worker count never changes a
result.
"""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from . import critical
from .detectors import count_crossings, evaluate, outcome
from .errors import BracketNotFound, InsufficientPoints, NonMonotoneProperty
from .geometry import Metric
from .graph import GraphConfig, generate, trial_seed, uniform_points
from .properties import Property

Z95 = statistics.NormalDist().inv_cdf(0.975)
UNKNOWN_ABORT_RATE = 0.10

CSV_HEADER = ["n", "r", "property", "k", "trials", "successes", "p_hat", "ci_lo", "ci_hi", "unknown", "seed"]


class UnknownRateWarning(UserWarning):
    pass


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("RGG_THREADS", "1")))
    except ValueError:
        return 1


def map_trials(fn, trials: int, workers: int | None = None) -> list:
    """``[fn(i) for i in range(trials)]``, possibly across processes."""
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or trials < 2:
        return [fn(i) for i in range(trials)]
    chunk = max(1, trials // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials), chunksize=chunk))


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    # guard ci_lo <= p_hat <= ci_hi against rounding at p = 0 or 1
    return (min(lo, p), max(hi, p))


@dataclass(frozen=True)
class SweepRow:
    n: int
    r: float
    property: Property
    trials: int
    successes: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    unknown_count: int
    master_seed: int
    metric: Metric = Metric.SQUARE

    @property
    def failures(self) -> int:
        return self.trials - self.successes - self.unknown_count

    def csv_row(self) -> list[str]:
        return [
            str(self.n),
            repr(float(self.r)),
            self.property.name,
            "" if self.property.k is None else str(self.property.k),
            str(self.trials),
            str(self.successes),
            repr(float(self.p_hat)),
            repr(float(self.ci_lo)),
            repr(float(self.ci_hi)),
            str(self.unknown_count),
            str(self.master_seed),
        ]


def _row(n, r, prop, outcomes, master_seed, metric) -> SweepRow:
    succ = sum(1 for o in outcomes if o is True)
    unk = sum(1 for o in outcomes if o is None)
    decided = len(outcomes) - unk
    p_hat = succ / decided if decided else math.nan
    lo, hi = wilson_interval(succ, decided)
    if decided == 0:
        lo, hi = 0.0, 1.0
    return SweepRow(n, float(r), prop, len(outcomes), succ, p_hat, lo, hi, unk, master_seed, metric)


def _trial_outcome(i, *, n, r, prop, master_seed, metric):
    g = generate(GraphConfig(n, r, metric, trial_seed(master_seed, i)))
    return outcome(evaluate(g, prop))


def estimate(
    n: int,
    r: float,
    property: Property,
    trials: int,
    master_seed: int,
    metric: Metric | str = Metric.SQUARE,
    workers: int | None = None,
) -> SweepRow:
    """Empirical probability of ``property`` in G(n, r) over ``trials``
    seeded graphs, with a 95% Wilson interval over decided trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    metric = Metric.parse(metric)
    fn = partial(_trial_outcome, n=n, r=float(r), prop=property, master_seed=master_seed, metric=metric)
    return _row(n, r, property, map_trials(fn, trials, workers), master_seed, metric)


def sweep(
    n: int,
    property: Property,
    r_grid,
    trials: int,
    master_seed: int,
    metric: Metric | str = Metric.SQUARE,
    workers: int | None = None,
) -> list[SweepRow]:
    """One :func:`estimate` per radius.  Stops with an
    :class:`UnknownRateWarning` once a row has more than 10% undecided
    trials (the offending row is returned)."""
    rows = []
    for r in r_grid:
        row = estimate(n, r, property, trials, master_seed, metric, workers)
        rows.append(row)
        if row.unknown_count > UNKNOWN_ABORT_RATE * row.trials:
            warnings.warn(
                f"{row.unknown_count}/{row.trials} undecided trials at n={n}, r={r}; sweep aborted",
                UnknownRateWarning,
                stacklevel=2,
            )
            break
    return rows


def log_grid(r_lo: float, r_hi: float, num: int) -> list[float]:
    return [float(x) for x in np.geomspace(r_lo, r_hi, num)]


# --------------------------------------------------------------------------
# thresholds


def _trial_critical(i, *, n, prop, master_seed, metric):
    pts = uniform_points(n, trial_seed(master_seed, i))
    return critical.critical_radius(pts, prop, metric)


def critical_radii(n, property, trials, master_seed, metric=Metric.SQUARE, workers=None) -> np.ndarray:
    metric = Metric.parse(metric)
    fn = partial(_trial_critical, n=n, prop=property, master_seed=master_seed, metric=metric)
    return np.array(map_trials(fn, trials, workers), dtype=float)


def row_from_critical(n, r, prop, crits, master_seed, metric) -> SweepRow:
    """The :class:`SweepRow` that :func:`estimate` would produce, read off
    precomputed critical radii."""
    outs = [critical.holds_at(c, r, prop) for c in crits.tolist()]
    return _row(n, r, prop, outs, master_seed, Metric.parse(metric))


@dataclass
class ThresholdEstimate:
    n: int
    property: Property
    r_star: float
    bracket: tuple[float, float]
    trials_per_probe: int
    target_p: float = 0.5
    master_seed: int = 0
    metric: Metric = Metric.SQUARE
    probes: list[tuple[float, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "property": self.property.name,
            "k": self.property.k,
            "r_star": self.r_star,
            "bracket": list(self.bracket),
            "trials_per_probe": self.trials_per_probe,
            "target_p": self.target_p,
            "master_seed": self.master_seed,
            "metric": self.metric.value,
            "probes": [list(p) for p in self.probes],
        }


def locate_threshold(
    n: int,
    property: Property,
    target_p: float = 0.5,
    trials_per_probe: int = 400,
    tolerance: float = 0.01,
    master_seed: int = 0,
    metric: Metric | str = Metric.SQUARE,
    bracket: tuple[float, float] | None = None,
    workers: int | None = None,
    max_iter: int = 200,
) -> ThresholdEstimate:
    """Bisect on ln r for the radius where P(property) crosses ``target_p``.

    Probes are estimates over the same ``trials_per_probe`` seeded point
    sets.  For properties with a per-point-set critical radius the probes
    are read from those radii (identical to calling :func:`estimate`);
    otherwise each probe calls :func:`estimate`.  Stops once
    ``r_hi - r_lo <= tolerance * r_star`` and returns the geometric
    midpoint.
    """
    metric = Metric.parse(metric)
    if not property.monotone:
        raise NonMonotoneProperty(f"{property} is not monotone in r")
    if bracket is not None and not 0 < bracket[0] < bracket[1]:
        raise ValueError("bracket must satisfy 0 < r_lo < r_hi")
    if critical.supports(property):
        crits = critical_radii(n, property, trials_per_probe, master_seed, metric, workers)
        probe_row = lambda r: row_from_critical(n, r, property, crits, master_seed, metric)
    else:
        probe_row = lambda r: estimate(n, r, property, trials_per_probe, master_seed, metric, workers)
    return _bisect(n, property, probe_row, trials_per_probe, target_p, tolerance, master_seed, metric, bracket, max_iter)


def threshold_from_radii(
    n: int,
    property: Property,
    crits,
    target_p: float = 0.5,
    tolerance: float = 0.01,
    master_seed: int = 0,
    metric: Metric | str = Metric.SQUARE,
    bracket: tuple[float, float] | None = None,
    max_iter: int = 200,
) -> ThresholdEstimate:
    """:func:`locate_threshold` with the per-trial critical radii supplied
    (e.g. loaded from a cache)."""
    metric = Metric.parse(metric)
    crits = np.asarray(crits, dtype=float)
    probe_row = lambda r: row_from_critical(n, r, property, crits, master_seed, metric)
    return _bisect(n, property, probe_row, len(crits), target_p, tolerance, master_seed, metric, bracket, max_iter)


def _bisect(n, property, probe_row, trials, target_p, tolerance, master_seed, metric, bracket, max_iter):
    if bracket is None:
        bracket = (1.0 / (n * n), critical.max_radius(metric))
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < r_lo < r_hi")
    increasing = property.direction == "increasing"
    probes: list[tuple[float, float]] = []

    def above(r: float) -> bool:
        """Has the probability passed the target (in the property's direction)?"""
        row = probe_row(r)
        probes.append((r, row.p_hat))
        if math.isnan(row.p_hat):
            raise BracketNotFound(f"no decided trials at r={r}")
        return row.p_hat >= target_p if increasing else row.p_hat < target_p

    if above(lo) or not above(hi):
        raise BracketNotFound(
            f"bracket [{lo}, {hi}] does not straddle p={target_p} for {property} at n={n}"
        )
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        if hi - lo <= tolerance * mid:
            break
        if above(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdEstimate(n, property, math.sqrt(lo * hi), (lo, hi), trials, target_p, master_seed, metric, probes)


# --------------------------------------------------------------------------
# exponent fits


@dataclass
class ExponentFit:
    points: list[tuple[int, float]]
    slope: float
    intercept: float
    stderr_slope: float

    def to_json(self) -> dict:
        return {
            "points": [[int(a), float(b)] for a, b in self.points],
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr_slope": self.stderr_slope,
        }


def fit_exponent(points) -> ExponentFit:
    """Least squares of ln r_star on ln n."""
    pts = [(int(a), float(b)) for a, b in points]
    if len(pts) < 3:
        raise InsufficientPoints("need at least 3 (n, r_star) points")
    if len({a for a, _ in pts}) != len(pts):
        raise InsufficientPoints("n values must be distinct")
    x = np.log([a for a, _ in pts])
    y = np.log([b for _, b in pts])
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    dof = len(pts) - 2
    stderr = math.sqrt(float((resid**2).sum()) / dof / sxx) if dof > 0 else 0.0
    return ExponentFit(pts, slope, intercept, stderr)


# --------------------------------------------------------------------------
# crossings


def _trial_crossings(i, *, n, r, master_seed, metric):
    return count_crossings(generate(GraphConfig(n, r, metric, trial_seed(master_seed, i))))


def crossing_counts(n, r, trials, master_seed, metric=Metric.SQUARE, workers=None) -> np.ndarray:
    metric = Metric.parse(metric)
    fn = partial(_trial_crossings, n=n, r=float(r), master_seed=master_seed, metric=metric)
    return np.array(map_trials(fn, trials, workers), dtype=np.int64)


def crossing_moments(n, r, trials, master_seed, metric=Metric.SQUARE, workers=None) -> tuple[float, float]:
    """Sample mean and (unbiased) variance of the number of crossings."""
    c = crossing_counts(n, r, trials, master_seed, metric, workers)
    mean = float(c.mean())
    var = float(c.var(ddof=1)) if len(c) > 1 else 0.0
    return mean, var


# --------------------------------------------------------------------------
# serialisation


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.csv_row())
    return buf.getvalue()


def rows_from_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
