"""Command-line front end.

Every subcommand prints one JSON document on stdout and, with ``--out DIR``,
writes its tables there as CSV/JSON.  Exit codes: 0 success, 1 bad input,
2 capacity exceeded, 3 internal check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from fractions import Fraction

from . import __version__
from .asymptotics import (
    Functional,
    KINDS,
    ball_average,
    coprimality_demo,
    growth_series,
    leading_coefficient,
    measure_convergence_report,
    simple_spelling_density,
    sphere_average,
    sphere_ball_factor_check,
)
from .errors import (
    CapacityExceeded,
    DimensionUnsupported,
    EmptySphere,
    FitMismatch,
    InvalidGenerators,
    WordMetricError,
)
from .lattice import build_hull, cone_measure, ehrhart_fit, picks_identity
from .metric import (
    DEFAULT_MAX_POINTS,
    cache_path,
    compute_K,
    load_or_build,
    verify_norm_bounds,
)
from .presets import PRESETS, load_generators, preset, rational, shape_to_json
from .sprawl import SprawlConfig, sprawl_empirical, sprawl_mc, sprawl_report

DEFAULT_SEED = 20100601

log = logging.getLogger("wordmetric")


class CheckFailed(WordMetricError):
    pass


def _gens(args):
    if args.gens:
        return load_generators(args.gens)
    return preset(args.preset or "std-d2")


def _out(args, name):
    if not args.out:
        return None
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _write_csv(path, header, rows):
    if path is None:
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path, doc):
    if path is None:
        return
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _cell(x):
    if isinstance(x, Fraction):
        return rational(x)
    if isinstance(x, float):
        return repr(x)
    return x


def _table(args, gens, radius=None):
    radius = args.radius if radius is None else radius
    return load_or_build(gens, radius, cache_dir=args.cache_dir, max_points=args.max_points)


def _polygon(shape):
    """Vertices of a planar ``L`` in counter-clockwise order (closed)."""
    verts = sorted(shape.vertices, key=lambda v: math.atan2(v[1], v[0]))
    return verts + verts[:1]


def cmd_hull(args):
    gens = _gens(args)
    shape = build_hull(gens)
    measure = cone_measure(shape)
    doc = shape_to_json(shape, measure)
    doc["generators"] = [list(v) for v in gens.vectors]
    doc["K"] = compute_K(gens, shape)
    doc["ehrhart"] = [rational(c) for c in ehrhart_fit(shape, gens.dim + 2)]
    if gens.dim == 2:
        pick = picks_identity(shape)
        doc["pick"] = {"interior": pick.interior, "boundary": pick.boundary,
                       "area": rational(pick.area), "holds": pick.holds}
        _write_csv(_out(args, "shape.csv"), ["x", "y"], _polygon(shape))
        if not pick.holds:
            raise CheckFailed("Pick's identity failed")
    _write_json(_out(args, "hull.json"), doc)
    return doc


def _fit(seq, k, volume):
    try:
        lc = leading_coefficient(seq, k)
    except WordMetricError:
        return None
    return {"estimate": float(lc.estimate), "error": float(lc.error),
            "residual": float(lc.residual), "window": list(lc.window),
            "expected": rational(volume)}


def cmd_growth(args):
    gens = _gens(args)
    shape = build_hull(gens)
    table = _table(args, gens)
    g = growth_series(table)
    rows = [(n, b, s) for n, (b, s) in enumerate(zip(g.beta, g.sigma))]
    _write_csv(_out(args, "growth.csv"), ["n", "beta", "sigma"], rows)
    d = gens.dim
    doc = {
        "radius": args.radius,
        "volume": rational(shape.volume),
        "beta": _fit(g.beta, d, shape.volume),
        "sigma": _fit(g.sigma, d - 1, d * shape.volume),
    }
    _write_json(_out(args, "growth_fit.json"), doc)
    return doc


def _radii(args, lo=1):
    step = max(1, args.step)
    radii = list(range(lo, args.radius + 1, step))
    # the requested radius always gets a row
    if not radii or radii[-1] != args.radius:
        radii.append(args.radius)
    return radii


def cmd_measure(args):
    gens = _gens(args)
    shape = build_hull(gens)
    measure = cone_measure(shape)
    table = _table(args, gens)
    K = compute_K(gens, shape)
    bounds = verify_norm_bounds(table, shape, K)
    if not bounds.ok:
        raise CheckFailed(f"{len(bounds.violations)} points violate the bounded-difference lemma")
    radii = _radii(args)
    report = measure_convergence_report(table, shape, radii, measure)
    g = growth_series(table)
    k = len(shape.simplices)
    header = ["n", "beta", "sigma"] + [f"sector_{i}" for i in range(k)] + ["D"]
    rows = [
        [n, g.beta[n], g.sigma[n], *h.counts, repr(dev)]
        for n, h, dev in zip(radii, report.histograms, report.deviations)
    ]
    _write_csv(_out(args, "measure.csv"), header, rows)
    if args.overlay:
        pts = []
        for n in args.overlay:
            if n > table.radius:
                raise InvalidGenerators(f"overlay radius {n} exceeds --radius")
            pts.extend([n, *p] for p in table.sphere(n).tolist())
        axes = [f"x{i + 1}" for i in range(gens.dim)]
        _write_csv(_out(args, "sphere_points.csv"), ["n"] + axes, pts)
        if gens.dim == 2:
            _write_csv(_out(args, "shape.csv"), ["x", "y"], _polygon(shape))
    return {
        "radius": args.radius,
        "weights": [rational(w) for w in measure.weights],
        "K": K,
        "max_gap": rational(bounds.max_gap),
        "D_last": report.deviations[-1],
        "first_quartile_median": report.first_quartile_median,
        "last_quartile_median": report.last_quartile_median,
        "decreasing": report.decreasing,
    }


def _functional(args, dim):
    exps = tuple(args.exponents or ())
    if args.functional == "coordinate-monomial" and len(exps) != dim:
        raise InvalidGenerators(f"--exponents needs {dim} values")
    return Functional(args.functional, args.power, exps)


def cmd_average(args):
    gens = _gens(args)
    f = _functional(args, gens.dim)
    shape = build_hull(gens)
    table = _table(args, gens)
    header = ["n", "ball_avg", "sphere_avg", "ball_normalized", "sphere_normalized",
              "ratio", "target"]
    rows = []
    for n in _radii(args):
        b = ball_average(table, f, n, shape)
        s = sphere_average(table, f, n, shape)
        if f.homogeneous:
            chk = sphere_ball_factor_check(table, f, shape, n)
            extra = [chk.ball_normalized, chk.sphere_normalized, chk.ratio, chk.target]
        else:
            extra = ["", "", "", ""]
        rows.append([n, b, s, *extra])
    _write_csv(_out(args, "average.csv"), header, [[_cell(x) for x in r] for r in rows])
    last = rows[-1]
    return {"functional": f.kind, "power": f.p, "order": f.order, "radius": last[0],
            "ball_avg": _cell(last[1]), "sphere_avg": _cell(last[2]),
            "ratio": _cell(last[5]), "target": _cell(last[6])}


def cmd_sprawl(args):
    gens = _gens(args)
    shape = build_hull(gens)
    measure = cone_measure(shape)
    config = {"method": args.method, "radius": args.radius, "samples": args.samples,
              "pair_budget": args.pair_budget, "seed": args.seed, "threads": args.threads,
              "generators": [list(v) for v in gens.vectors]}
    if args.method == "mc":
        est = sprawl_mc(shape, measure, args.samples, args.seed, threads=args.threads)
        doc = est.to_json()
    else:
        table = _table(args, gens, 2 * args.radius)
        if args.method == "empirical":
            doc = sprawl_empirical(table, args.radius, args.pair_budget, args.seed,
                                   shape).to_json()
        else:
            cfg = SprawlConfig(radius=args.radius, samples=args.samples,
                               pair_budget=args.pair_budget, seed=args.seed,
                               threads=args.threads)
            doc = sprawl_report(shape, measure, table, cfg).to_json()
    doc["config"] = config
    _write_json(_out(args, "sprawl.json"), doc)
    return doc


def cmd_density(args):
    gens = _gens(args)
    shape = build_hull(gens)
    table = _table(args, gens)
    rep = simple_spelling_density(table, shape, args.radius)
    doc = {"radius": rep.radius, "sphere": rational(rep.sphere), "ball": rational(rep.ball),
           "sphere_float": float(rep.sphere), "ball_float": float(rep.ball),
           "target": None if rep.target is None else rational(rep.target)}
    _write_json(_out(args, "density.json"), doc)
    return doc


def cmd_demo_coprime(args):
    gens = _gens(args)
    if gens.dim != 2:
        raise DimensionUnsupported("demo-coprime needs a planar generating set")
    lo = args.parity_from if args.parity_from is not None else max(1, args.radius - 20)
    table = _table(args, gens)
    radii = sorted(set(range(lo, args.radius + 1)))
    rep = coprimality_demo(table, radii)
    rows = [[n, repr(rep.ball[n]), repr(rep.sphere[n])] for n in radii]
    _write_csv(_out(args, "coprime.csv"), ["n", "ball_avg", "sphere_avg"], rows)
    doc = {"radius": args.radius, "ball_average": rep.ball[args.radius],
           "six_over_pi_squared": 6 / math.pi ** 2,
           "parity_gap": rep.parity_gap,
           "even": {str(k): v for k, v in rep.even.items()},
           "odd": {str(k): v for k, v in rep.odd.items()}}
    _write_json(_out(args, "coprime.json"), doc)
    return doc


def cmd_cache(args):
    if not args.cache_dir:
        raise InvalidGenerators("the cache subcommand needs --cache-dir")
    gens = _gens(args)
    table = _table(args, gens)
    return {"path": cache_path(args.cache_dir, gens), "radius": table.radius,
            "points": len(table)}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--gens", metavar="FILE",
                     help='JSON {"dim", "generators", "symmetrize"}')
    src.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--radius", type=int, default=50)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cache-dir", metavar="DIR")
    common.add_argument("--max-points", type=int, default=DEFAULT_MAX_POINTS)
    common.add_argument("--step", type=int, default=1, help="radius stride for per-radius tables")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="wordmetric", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("hull", parents=[common], help="limit shape, cone measure, Pick check")
    sub.add_parser("growth", parents=[common], help="growth series and leading coefficients")
    p = sub.add_parser("measure", parents=[common], help="sector counts and D(n)")
    p.add_argument("--overlay", type=int, nargs="*", metavar="N",
                   help="also dump the spheres S_N as points")
    p = sub.add_parser("average", parents=[common], help="sphere/ball averages")
    p.add_argument("--functional", choices=KINDS, default="word-length-power")
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--exponents", type=int, nargs="*")
    p = sub.add_parser("sprawl", parents=[common], help="sprawl statistic E(Z^d, S)")
    p.add_argument("--method", choices=("empirical", "mc", "both"), default="mc")
    p.add_argument("--samples", type=int, default=10 ** 6)
    p.add_argument("--pair-budget", type=int, default=10 ** 6)
    sub.add_parser("density", parents=[common], help="simple-spelling densities")
    p = sub.add_parser("demo-coprime", parents=[common], help="coprimality parity demo")
    p.add_argument("--parity-from", type=int, help="first radius of the parity window")
    sub.add_parser("cache", parents=[common], help="build the on-disk word-length cache")
    return parser


COMMANDS = {
    "hull": cmd_hull,
    "growth": cmd_growth,
    "measure": cmd_measure,
    "average": cmd_average,
    "sprawl": cmd_sprawl,
    "density": cmd_density,
    "demo-coprime": cmd_demo_coprime,
    "cache": cmd_cache,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.radius < 0:
        print("error: --radius must be nonnegative", file=sys.stderr)
        return 1
    try:
        doc = COMMANDS[args.command](args)
    except CapacityExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (CheckFailed, FitMismatch, EmptySphere) as e:
        print(f"error: internal check failed: {e}", file=sys.stderr)
        return 3
    except json.JSONDecodeError as e:
        print(f"error: cannot parse generator file: {e}", file=sys.stderr)
        return 1
    except (WordMetricError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
