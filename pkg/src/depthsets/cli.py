"""Command-line front end.

Exit codes: 0 success, 2 usage or validation error, 3 when an input polytope
is empty or unbounded where a bounded body is required.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bounds, depth, experiments, linprog
from .distr import Kind, distribution_from_config
from .errors import (CapacityError, DegeneratePolytopeError, DomainError, EmptyPolytopeError,
                     InvalidArgument, UnboundedPolytopeError, UnsupportedDistribution)
from .geom import (DEFAULT_TOL, deterministic_net, read_point_cloud, read_polytope,
                   uniform_direction_array, write_polytope)
from .metric import hausdorff_support
from .quantile import as_level

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STATUS = 3

DEFAULT_NET_DELTA = {2: 0.01, 3: 0.05}


class StatusError(Exception):
    """Input has the wrong emptiness status; maps to exit code 3."""


def fmt(x: float) -> str:
    return format(float(x), "#.12g")


def _floats(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _net_delta(value, d):
    delta = value if value is not None else DEFAULT_NET_DELTA.get(d, 0.05)
    if not (0 < delta <= 1):
        raise InvalidArgument(f"--net-delta must lie in (0, 1], got {delta}")
    return delta


# -- depth ----------------------------------------------------------------------

def cmd_depth(args) -> int:
    cloud = read_point_cloud(args.input, header=args.header)
    x = np.asarray(args.point)
    if x.size != cloud.dim:
        raise InvalidArgument(f"--point has dimension {x.size}, input has {cloud.dim}")
    if args.method == "exact2d":
        val = depth.depth_exact_2d(cloud, x)
        note = ""
    else:
        if args.directions is not None:
            if args.directions < 1:
                raise InvalidArgument("--directions must be >= 1")
            net = uniform_direction_array(cloud.dim, args.directions, args.seed)
        else:
            net = deterministic_net(cloud.dim, _net_delta(args.net_delta, cloud.dim))
        val = depth.depth_upper_bound(cloud, x, net)
        note = " upper-bound"
    print(f"depth {val} ({val.ratio:.12g}){note}")
    return EXIT_OK


# -- levelset -------------------------------------------------------------------

def _read_directions(path, d):
    U = read_point_cloud(path).points
    if U.shape[1] != d:
        raise InvalidArgument(f"directions file has dimension {U.shape[1]}, input has {d}")
    if np.any(np.linalg.norm(U, axis=1) == 0):
        raise InvalidArgument("directions file contains a zero vector")
    return U


def cmd_levelset(args) -> int:
    level = as_level(args.alpha)
    if args.tol < 0:
        raise InvalidArgument("--tol must be nonnegative")
    cloud = read_point_cloud(args.input, header=args.header)
    if args.method == "exact2d":
        result = depth.levelset_exact_2d(cloud, level)
    else:
        if args.directions_file is not None:
            U = _read_directions(args.directions_file, cloud.dim)
        else:
            if args.directions < 1:
                raise InvalidArgument("--directions must be >= 1")
            U = uniform_direction_array(cloud.dim, args.directions, args.seed)
        result = depth.levelset_sampled(cloud, level, U)
    if args.truncate_log_n:
        if cloud.n < 2:
            raise InvalidArgument("--truncate-log-n needs n >= 2 (log n > 0)")
        result = depth.truncate(result, math.log(cloud.n))
    status = depth.classify(result.polytope, args.tol)
    write_polytope(result.polytope, args.output)
    print(f"status {status.value} constraints {len(result.polytope)}")
    return EXIT_OK


# -- hausdorff ------------------------------------------------------------------

def _check_body(P, name):
    if linprog.is_empty(P):
        raise StatusError(f"{name}: empty")
    if not linprog.is_bounded(P):
        raise StatusError(f"{name}: unbounded")


def cmd_hausdorff(args) -> int:
    P = read_polytope(args.a, header=args.header, dim=args.dim)
    Q = read_polytope(args.b, header=args.header, dim=args.dim)
    if P.dim != Q.dim:
        raise InvalidArgument(f"dimension mismatch: {P.dim} vs {Q.dim}")
    delta = _net_delta(args.net_delta, P.dim)
    if delta >= 1:
        raise InvalidArgument("--net-delta must be below 1 for a finite certified error")
    _check_body(P, args.a)
    _check_body(Q, args.b)
    est = hausdorff_support(P, Q, deterministic_net(P.dim, delta))
    print(f"{fmt(est.value)} {fmt(est.certified_error)}")
    return EXIT_OK


# -- experiments ----------------------------------------------------------------

def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as e:
            raise InvalidArgument(f"{path}:{e.lineno}: invalid JSON: {e.msg}") from None
    if not isinstance(cfg, dict):
        raise InvalidArgument(f"{path}: top level must be an object")
    return cfg


def _pick(flag, cfg, key, default):
    return flag if flag is not None else cfg.get(key, default)


def _rate_config(args, cfg, n_default, reps_default) -> experiments.RateExperimentConfig:
    dist = distribution_from_config(cfg.get("distribution", {"kind": "gaussian", "dim": 2}))
    directions = dict(cfg.get("directions", {}))
    rule = experiments.DirectionsRule(
        kind=_pick(args.directions_rule, directions, "kind", "fixed"),
        M=int(_pick(args.M, directions, "M", 4000)),
        k=float(_pick(args.k, directions, "k", 1.0)))
    return experiments.RateExperimentConfig(
        dist=dist,
        alpha=float(_pick(args.alpha, cfg, "alpha", 0.2)),
        n_grid=tuple(_pick(args.n_grid, cfg, "n_grid", n_default)),
        reps=int(_pick(args.reps, cfg, "reps", reps_default)),
        directions_rule=rule,
        net_delta=float(_pick(args.net_delta, cfg, "net_delta", 0.01)),
        base_seed=int(_pick(args.seed, cfg, "seed", 0)))


def _tail_params(cfg, rc: experiments.RateExperimentConfig) -> bounds.AssumptionParams:
    if "params" in cfg:
        p = cfg["params"]
        return bounds.AssumptionParams(p["epsilon"], p["L"], p["r"], p["R"], tuple(p.get("a", ())),
                                       p.get("tau"))
    dist = rc.dist
    cov = dist.params.get("cov") if dist.kind is Kind.GAUSSIAN else None
    if cov is None or not np.allclose(cov, cov[0, 0] * np.eye(dist.dim)) \
            or np.any(dist.params["mean"] != 0):
        raise InvalidArgument("tail experiment needs explicit params unless the "
                              "distribution is a centred isotropic Gaussian")
    return bounds.gaussian_assumption_params(rc.alpha.alpha, math.sqrt(cov[0, 0]), d=dist.dim)


def _default_x_grid(params, d, n, points=8):
    low, high = bounds.theorem2_domain(params, d, n)
    if high <= low:
        high = 2 * low
    return list(np.linspace(low, high, points, endpoint=False))


def _experiment_rate(args, cfg) -> int:
    rc = _rate_config(args, cfg, (250, 1000, 4000), 50)
    result = experiments.run_rate_experiment(rc, threads=args.threads)
    raw, summary = experiments.write_rate_outputs(result, args.output_dir)
    fit = result.fit
    print(f"slope {fmt(fit.slope)} stderr {fmt(fit.stderr)} intercept {fmt(fit.intercept)}")
    for row in result.per_n:
        print(f"n {row['n']} mean {fmt(row['mean'])} median {fmt(row['median'])}")
    print(f"wrote {raw} {summary}")
    return EXIT_OK


def _experiment_net(args, cfg) -> int:
    d = int(_pick(args.d, cfg, "d", 2))
    delta = float(_pick(args.delta, cfg, "delta", 1.0))
    m_grid = _pick(args.m_grid, cfg, "m_grid", [10, 30, 100, 300])
    reps = int(_pick(args.reps, cfg, "reps", 500))
    seed = int(_pick(args.seed, cfg, "seed", 0))
    if not m_grid or any(m < 1 for m in m_grid):
        raise InvalidArgument("--m-grid needs positive integers")
    rows = experiments.run_net_experiment(d, delta, m_grid, reps, seed)
    path = experiments.write_net_outputs(rows, args.output_dir)
    for r in rows:
        print(f"M {r['M']} frequency {fmt(r['frequency'])} bound {fmt(r['bound'])} "
              f"within {str(r['within_bound']).lower()}")
    print(f"wrote {path}")
    return EXIT_OK


def _experiment_tail(args, cfg) -> int:
    rc = _rate_config(args, cfg, (1000,), 200)
    params = _tail_params(cfg, rc)
    variant = bounds.ExponentVariant(_pick(args.exponent_variant, cfg, "exponent_variant",
                                           "lemma"))
    x_grid = _pick(args.x_grid, cfg, "x_grid", None)
    if x_grid is None:
        x_grid = _default_x_grid(params, rc.dist.dim, rc.n_grid[0])
    rows = experiments.run_tail_experiment(rc, params, x_grid, threads=args.threads,
                                           variant=variant)
    path = experiments.write_tail_outputs(rows, args.output_dir)
    for r in rows:
        print(f"n {r['n']} x {fmt(r['x'])} exceedance {fmt(r['exceedance'])} "
              f"in_domain {str(r['in_domain']).lower()} satisfied {str(r['satisfied']).lower()}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.threads is not None and args.threads < 1:
        raise InvalidArgument("--threads must be >= 1")
    if args.threads is None:
        args.threads = experiments.default_threads()
    cfg = _load_config(args.config)
    return {"rate": _experiment_rate, "net": _experiment_net,
            "tail": _experiment_tail}[args.kind](args, cfg)


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="depthsets",
                                description="Tukey depth level sets and rate experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("depth", help="depth of a point in a CSV point cloud")
    d.add_argument("--input", required=True)
    d.add_argument("--header", action="store_true", help="skip one header line")
    d.add_argument("--point", required=True, type=_floats)
    d.add_argument("--method", choices=("exact2d", "net"), default="exact2d")
    d.add_argument("--net-delta", type=float)
    d.add_argument("--directions", type=int,
                   help="use this many random directions instead of a covering net")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_depth)

    ls = sub.add_parser("levelset", help="depth level set as an H-polytope CSV")
    ls.add_argument("--input", required=True)
    ls.add_argument("--header", action="store_true")
    ls.add_argument("--alpha", required=True, type=float)
    ls.add_argument("--method", choices=("exact2d", "sampled"), default="sampled")
    ls.add_argument("--directions", type=int, default=1000)
    ls.add_argument("--directions-file",
                    help="CSV of directions to use instead of random ones")
    ls.add_argument("--seed", type=int, default=0)
    ls.add_argument("--truncate-log-n", action="store_true",
                    help="intersect with the ball of radius log n ({0} if empty)")
    ls.add_argument("--tol", type=float, default=DEFAULT_TOL)
    ls.add_argument("--output", required=True)
    ls.set_defaults(func=cmd_levelset)

    h = sub.add_parser("hausdorff", help="Hausdorff distance of two H-polytope CSVs")
    h.add_argument("--a", required=True)
    h.add_argument("--b", required=True)
    h.add_argument("--header", action="store_true")
    h.add_argument("--dim", type=int, help="dimension for empty constraint files")
    h.add_argument("--net-delta", type=float)
    h.set_defaults(func=cmd_hausdorff)

    e = sub.add_parser("experiment", help="Monte Carlo experiments")
    e.add_argument("kind", choices=("rate", "net", "tail"))
    e.add_argument("--config", help="JSON config; flags override its keys")
    e.add_argument("--output-dir", default=".")
    e.add_argument("--threads", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--reps", type=int)
    e.add_argument("--alpha", type=float)
    e.add_argument("--n-grid", type=_ints)
    e.add_argument("--directions-rule", choices=("fixed", "corollary4"))
    e.add_argument("--M", type=int)
    e.add_argument("--k", type=float)
    e.add_argument("--net-delta", type=float)
    e.add_argument("--d", type=int)
    e.add_argument("--delta", type=float)
    e.add_argument("--m-grid", type=_ints)
    e.add_argument("--x-grid", type=_floats)
    e.add_argument("--exponent-variant", choices=("lemma", "theorem"))
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StatusError, EmptyPolytopeError, UnboundedPolytopeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_STATUS
    except (InvalidArgument, DomainError, CapacityError, DegeneratePolytopeError,
            UnsupportedDistribution, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
