"""Command-line front end.

Subcommands: generate, detect, sweep, threshold, fit, crossings.  Sweep,
threshold, fit and crossings also take ``--recipe NAME`` to run a pinned
reproduction configuration.  Exit codes: 0 success, 2 usage (bad flags or
parameters), 3 I/O failure.  The worker count comes from ``RGG_THREADS``
only and never changes the output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from . import detectors as det
from . import recipes
from .errors import PointFileError, RggError
from .geometry import Metric
from .graph import GraphConfig, components, dumps_points, generate, load_graph
from .montecarlo import (
    ExponentFit,
    crossing_moments,
    fit_exponent,
    locate_threshold,
    log_grid,
    rows_to_csv,
    sweep,
)
from .properties import Kind, Property


class UsageError(Exception):
    pass


def _meta(command: str, args: argparse.Namespace) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "func")}
    return {"command": command, "flags": flags, "seed": getattr(args, "seed", None), "version": __version__}


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def _emit(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _property(args) -> Property:
    try:
        return Property.parse(args.property, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# generate / detect


def cmd_generate(args) -> int:
    cfg = GraphConfig(args.n, args.r, args.metric, args.seed)
    g = generate(cfg)
    _emit(dumps_points(g.points, g.r, g.metric), args.out)
    return 0


def _load_or_generate(args):
    if args.infile is not None:
        if args.n is not None or args.seed is not None:
            raise UsageError("--in excludes --n/--seed")
        return load_graph(args.infile)
    if args.n is None or args.r is None or args.seed is None:
        raise UsageError("need --in, or all of --n, --r and --seed")
    return generate(GraphConfig(args.n, args.r, args.metric, args.seed))


def _crossing_checks(g, pairs) -> dict:
    inv = [det.crossing_invariants(g, p) for p in pairs]
    return {
        "crossings_checked": len(inv),
        "adjacent_sides": all(i["adjacent_sides"] for i in inv),
        "within_2r": all(i["within_2r"] for i in inv),
        "crown": all(i["crown"] for i in inv),
    }


def detect_verdict(g, prop: Property) -> dict:
    """JSON-ready verdict for one graph and property."""
    out: dict = {"property": prop.name, "k": prop.k, "n": g.n, "r": g.r, "metric": g.metric.value, "m": g.m}
    kind = prop.kind
    if kind is Kind.INDEPENDENT_K:
        out.update(det.independent_k(g, prop.k).to_json())
        return out
    if kind is Kind.CLIQUE_K:
        dec = det.has_clique_k(g, prop.k)
        out["result"] = "true" if dec.is_yes else "false"
        if dec.witness is not None:
            out["witness"] = list(dec.witness)
        return out
    value = bool(det.evaluate(g, prop))
    out["result"] = "true" if value else "false"
    if kind is Kind.HAS_EDGE and value:
        out["witness"] = [int(v) for v in g.edges[0]]
    elif kind is Kind.CONNECTED_K and value:
        comp = next(c for c in components(g) if len(c) >= prop.k)
        out["witness"] = [int(v) for v in comp]
    elif kind is Kind.PLANE:
        pairs = det.crossing_pairs(g)
        out["crossing_count"] = len(pairs)
        if pairs:
            a = det.find_anchor(g)
            out["witness"] = {
                "crossing": [list(pairs[0].e1), list(pairs[0].e2)],
                "anchor": {"crown": a.crown, "triangle": list(a.triangle), "apex": a.apex},
            }
        out["self_checks"] = _crossing_checks(g, pairs)
    elif kind is Kind.PLANAR:
        cert = det.planarity_certificate(g)
        if not cert["planar"]:
            out["witness"] = {
                "kuratowski_vertices": cert["witness_vertices"],
                "kuratowski_edges": [list(e) for e in cert["witness_edges"]],
            }
    elif kind in (Kind.HAS_FREE_EDGE, Kind.ALL_EDGES_FREE):
        mask = det.free_edge_mask(g)
        out["free_edge_count"] = int(mask.sum())
        if kind is Kind.HAS_FREE_EDGE and value:
            out["witness"] = [int(v) for v in g.edges[np.argmax(mask)]]
        if kind is Kind.ALL_EDGES_FREE and not value:
            eid = int(np.argmin(mask))
            out["witness"] = {
                "edge": [int(v) for v in g.edges[eid]],
                "touched_by": list(det.edge_crossed_by(g, eid)),
            }
        pairs = det.crossing_pairs(g)
        out["crossing_count"] = len(pairs)
        out["self_checks"] = _crossing_checks(g, pairs)
    return out


def cmd_detect(args) -> int:
    prop = _property(args)
    g = _load_or_generate(args)
    out = {"meta": _meta("detect", args)}
    out.update(detect_verdict(g, prop))
    _emit(_dump_json(out), args.out)
    return 0


# --------------------------------------------------------------------------
# experiments


def _run_recipe(command, args) -> int:
    if args.seed is None:
        args.seed = recipes.MASTER_SEED
    res = recipes.run(args.recipe, cache_dir=args.cache, seed=args.seed)
    _emit(_dump_json({"meta": _meta(command, args), **res}), args.out)
    return 0


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join(missing))


def cmd_sweep(args) -> int:
    if args.recipe:
        return _run_recipe("sweep", args)
    if args.seed is None:
        args.seed = 0
    _require(args, "n", "property")
    prop = _property(args)
    if args.r_grid is not None:
        grid = [float(x) for x in args.r_grid.split(",") if x.strip()]
    else:
        _require(args, "r_min", "r_max", "num")
        grid = log_grid(args.r_min, args.r_max, args.num)
    rows = sweep(args.n, prop, grid, args.trials, args.seed, args.metric)
    header = "# " + json.dumps(_meta("sweep", args), sort_keys=False) + "\n"
    _emit(header + rows_to_csv(rows), args.out)
    return 0


def cmd_threshold(args) -> int:
    if args.recipe:
        return _run_recipe("threshold", args)
    if args.seed is None:
        args.seed = 0
    _require(args, "n", "property")
    prop = _property(args)
    est = locate_threshold(
        args.n,
        prop,
        target_p=args.target_p,
        trials_per_probe=args.trials,
        tolerance=args.tolerance,
        master_seed=args.seed,
        metric=args.metric,
        bracket=tuple(args.bracket) if args.bracket else None,
    )
    _emit(_dump_json({"meta": _meta("threshold", args), **est.to_json()}), args.out)
    return 0


def _fit_points(paths) -> list[tuple[int, float]]:
    pts = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}: not JSON ({exc})") from None
        docs = doc if isinstance(doc, list) else [doc]
        for d in docs:
            if "thresholds" in d:  # a recipe result
                docs.extend(d["thresholds"])
                continue
            if "results" in d:
                if len(d["results"]) != 1:
                    raise UsageError(f"{path}: recipe output holds several properties; pass one")
                docs.extend(d["results"])
                continue
            if "n" not in d or "r_star" not in d:
                raise UsageError(f"{path}: expected threshold JSON with n and r_star")
            pts.append((int(d["n"]), float(d["r_star"])))
    return pts


def cmd_fit(args) -> int:
    if args.recipe:
        return _run_recipe("fit", args)
    if not args.inputs:
        raise UsageError("fit needs threshold JSON files")
    fit: ExponentFit = fit_exponent(_fit_points(args.inputs))
    _emit(_dump_json({"meta": _meta("fit", args), **fit.to_json()}), args.out)
    return 0


def cmd_crossings(args) -> int:
    if args.recipe:
        return _run_recipe("crossings", args)
    if args.seed is None:
        args.seed = 0
    _require(args, "n", "r")
    mean, var = crossing_moments(args.n, args.r, args.trials, args.seed, args.metric)
    out = {"meta": _meta("crossings", args), "n": args.n, "r": args.r, "trials": args.trials, "mean": mean, "variance": var}
    _emit(_dump_json(out), args.out)
    return 0


# --------------------------------------------------------------------------
# parser


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(s):
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _metric(s):
    try:
        return Metric.parse(s).value
    except ValueError:
        raise argparse.ArgumentTypeError("metric is 'square' or 'torus'") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rggthresh", description="Distance thresholds in random geometric graphs.")
    ap.add_argument("--version", action="version", version=f"rggthresh {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--metric", type=_metric, default="square")
        p.add_argument("--seed", type=_seed, default=seed_default)
        p.add_argument("--out", default=None, help="output file (default stdout)")

    def prop_flags(p):
        p.add_argument("--property", choices=[k.value for k in Kind])
        p.add_argument("--k", type=int, default=None)

    def recipe_flags(p):
        p.add_argument("--recipe", choices=recipes.NAMES, default=None)
        p.add_argument("--cache", default=None, help="directory for resumable recipe state")

    p = sub.add_parser("generate", help="write a seeded point set")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", help="decide a property on one graph")
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--r", type=float, default=None)
    common(p, seed_default=None)
    prop_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("sweep", help="probability estimates over a radius grid (CSV)")
    p.add_argument("--n", type=int)
    prop_flags(p)
    p.add_argument("--r-grid", default=None, help="comma-separated radii")
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--num", type=int)
    p.add_argument("--trials", type=_positive_int, default=100)
    common(p, seed_default=None)
    recipe_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", help="locate the 50% radius (JSON)")
    p.add_argument("--n", type=int)
    prop_flags(p)
    p.add_argument("--trials", type=_positive_int, default=400)
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--target-p", type=float, default=0.5)
    p.add_argument("--bracket", type=float, nargs=2, default=None, metavar=("R_LO", "R_HI"))
    common(p, seed_default=None)
    recipe_flags(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("fit", help="fit ln r_star against ln n (JSON)")
    p.add_argument("inputs", nargs="*", help="threshold JSON files")
    common(p, seed_default=None)
    recipe_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("crossings", help="mean and variance of the crossing count (JSON)")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--trials", type=_positive_int, default=100)
    common(p, seed_default=None)
    recipe_flags(p)
    p.set_defaults(func=cmd_crossings)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (PointFileError, OSError) as exc:
        print(f"rggthresh: {exc}", file=sys.stderr)
        return 3
    except (UsageError, RggError, ValueError) as exc:
        print(f"rggthresh: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
