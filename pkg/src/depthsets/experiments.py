"""Monte Carlo checks of level-set concentration.

Three experiments: the log-log decay rate of the Hausdorff error of the
sampled-direction level set, the frequency with which random directions
fail to form a delta-net, and empirical Hausdorff tails next to the
deviation bound. Every replication draws from its own seed, and results are
collected in (n, rep) order, so outputs are reproducible byte for byte.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import stats

from . import bounds, depth, metric
from .distr import ReferenceDistribution, population_levelset, sample
from .errors import DomainError, InvalidArgument
from .geom import NetKind, SphereNet, deterministic_net, is_delta_net, uniform_direction_array
from .quantile import LevelSpec, as_level

log = logging.getLogger(__name__)

RATE_RAW = "rate_raw.csv"
RATE_SUMMARY = "rate_summary.json"
NET_RAW = "net_raw.csv"
TAIL_RAW = "tail_raw.csv"


@dataclass(frozen=True)
class DirectionsRule:
    """Either a fixed number of directions or the rule ``M(n)`` with
    moment order ``k`` from :func:`bounds.corollary4_directions`."""

    kind: str = "fixed"
    M: int = 4000
    k: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fixed", "corollary4"):
            raise InvalidArgument(f"unknown directions rule {self.kind!r}")
        if self.kind == "fixed" and self.M < 1:
            raise InvalidArgument("M must be >= 1")

    def count(self, d: int, n: int) -> int:
        if self.kind == "fixed":
            return self.M
        return bounds.corollary4_directions(d, n, self.k)


@dataclass(frozen=True, eq=False)
class RateExperimentConfig:
    dist: ReferenceDistribution
    alpha: LevelSpec
    n_grid: tuple
    reps: int
    directions_rule: DirectionsRule = field(default_factory=DirectionsRule)
    net_delta: float = 0.01
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_level(self.alpha))
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(n < 1 for n in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidArgument(f"n_grid must be strictly increasing positive integers: {grid}")
        object.__setattr__(self, "n_grid", grid)
        if self.reps < 1:
            raise InvalidArgument(f"reps must be >= 1, got {self.reps}")
        if not (0 < self.net_delta < 1):
            raise InvalidArgument(f"net_delta must lie in (0, 1), got {self.net_delta}")

    def seed_for(self, n_index: int, rep: int) -> int:
        return self.base_seed + n_index * self.reps + rep


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    stderr: float
    per_n_mean_error: tuple


@dataclass
class RateResult:
    fit: RateFit
    median_fit: RateFit
    second_moment_fit: RateFit
    rows: list
    per_n: list

    def summary(self) -> dict:
        return {
            "slope": self.fit.slope,
            "intercept": self.fit.intercept,
            "stderr": self.fit.stderr,
            "median_slope": self.median_fit.slope,
            "second_moment_slope": self.second_moment_fit.slope,
            "per_n": self.per_n,
        }


def fit_rate(ns, errors) -> RateFit:
    """Least-squares line through ``(log n, log error)``.

    With two points the line is exact and the slope standard error is
    reported as 0.
    """
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ns.size < 2:
        raise InvalidArgument("a rate fit needs at least two sample sizes")
    if np.any(errors <= 0) or not np.all(np.isfinite(errors)):
        raise InvalidArgument("rate fit needs positive finite errors")
    x, y = np.log(ns), np.log(errors)
    res = stats.linregress(x, y)
    stderr = float(res.stderr) if ns.size > 2 else 0.0
    return RateFit(float(res.slope), float(res.intercept), stderr,
                   tuple((int(n), float(e)) for n, e in zip(ns, errors)))


# -- rate experiment ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Oracle:
    h: np.ndarray
    canonical: np.ndarray
    conversion_error: float
    net_points: np.ndarray
    net_delta: float
    radius_bound: float


def _build_oracle(cfg: RateExperimentConfig) -> _Oracle:
    pop = population_levelset(cfg.dist, cfg.alpha)
    Q, conv = pop.to_polytope()
    net = deterministic_net(cfg.dist.dim, cfg.net_delta)
    h, can = metric.support_table(Q, net, "population level set")
    R = metric.outer_radius(Q, can)
    return _Oracle(h, can, conv, net.points, net.delta, R)


def _replicate(cfg: RateExperimentConfig, oracle: _Oracle, n_index: int, rep: int) -> dict:
    n = cfg.n_grid[n_index]
    d = cfg.dist.dim
    seed = cfg.seed_for(n_index, rep)
    M = cfg.directions_rule.count(d, n)
    cloud = sample(cfg.dist, n, seed)
    U = uniform_direction_array(d, M, [seed, 1])
    G = depth.levelset_sampled(cloud, cfg.alpha, U)
    if G.emptiness is not depth.Emptiness.NONEMPTY:
        log.warning("n=%d rep=%d: sampled level set is %s", n, rep, G.emptiness.value)
        return {"n": n, "rep": rep, "seed": seed, "M": M,
                "hausdorff": math.nan, "certified_error": math.nan}
    net = _net_view(oracle)
    h, can = metric.support_table(G.polytope, net, "sampled level set")
    est = metric.hausdorff_from_tables(h, can, oracle.h, oracle.canonical, oracle.net_delta, d)
    return {"n": n, "rep": rep, "seed": seed, "M": M, "hausdorff": est.value,
            "certified_error": est.certified_error + oracle.conversion_error}


def _net_view(oracle: _Oracle):
    return SphereNet(oracle.net_points, oracle.net_delta, NetKind.DETERMINISTIC)


def _run_task(args):
    cfg, oracle, n_index, rep = args
    return _replicate(cfg, oracle, n_index, rep)


def _map_tasks(tasks, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_task, tasks, chunksize=1))


def _error_rows(cfg, error_hook, threads):
    if error_hook is not None:
        rows = []
        for i, n in enumerate(cfg.n_grid):
            for rep in range(cfg.reps):
                seed = cfg.seed_for(i, rep)
                rows.append({"n": n, "rep": rep, "seed": seed,
                             "M": cfg.directions_rule.count(cfg.dist.dim, n),
                             "hausdorff": float(error_hook(n, rep, seed)),
                             "certified_error": 0.0})
        return rows
    oracle = _build_oracle(cfg)
    tasks = [(cfg, oracle, i, rep) for i in range(len(cfg.n_grid)) for rep in range(cfg.reps)]
    return _map_tasks(tasks, threads)


def _per_n(cfg, rows):
    out = []
    for n in cfg.n_grid:
        vals = np.array([r["hausdorff"] for r in rows if r["n"] == n])
        vals = vals[np.isfinite(vals)]
        out.append({"n": n, "mean": float(vals.mean()), "median": float(np.median(vals)),
                    "sd": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
                    "moment2": float(np.mean(vals ** 2))})
    return out


def run_rate_experiment(cfg: RateExperimentConfig, threads: int = 1,
                        error_hook: Callable[[int, int, int], float] | None = None
                        ) -> RateResult:
    """Fit the decay of the mean Hausdorff error across ``cfg.n_grid``.

    ``error_hook(n, rep, seed)``, when given, replaces the sampling
    pipeline and supplies the error of each replication directly.
    """
    if len(cfg.n_grid) < 2:
        raise InvalidArgument("the rate experiment needs at least two sample sizes")
    if cfg.reps < 2:
        raise InvalidArgument("the rate experiment needs reps >= 2")
    if error_hook is None:
        population_levelset(cfg.dist, cfg.alpha)  # fail early on unsupported input
    rows = _error_rows(cfg, error_hook, threads)
    per_n = _per_n(cfg, rows)
    ns = [p["n"] for p in per_n]
    return RateResult(
        fit=fit_rate(ns, [p["mean"] for p in per_n]),
        median_fit=fit_rate(ns, [p["median"] for p in per_n]),
        second_moment_fit=fit_rate(ns, [p["moment2"] for p in per_n]),
        rows=rows, per_n=per_n)


# -- delta-net experiment ------------------------------------------------------

def run_net_experiment(d: int, delta: float, m_grid, reps: int, seed: int = 0) -> list[dict]:
    """Frequency of non-nets among ``reps`` draws of ``M`` uniform directions.

    The membership test is conservative (it may call a true net a failure),
    so the frequency overestimates the failure probability; it is compared
    to the bound plus three binomial standard errors.
    """
    if d not in (2, 3):
        raise InvalidArgument(f"net experiment supports d in {{2, 3}}, got {d}")
    if reps < 1:
        raise InvalidArgument("reps must be >= 1")
    if not (0 < delta <= 1):
        raise InvalidArgument(f"delta must lie in (0, 1], got {delta}")
    probe = deterministic_net(d, delta / 2)
    rows = []
    for i, M in enumerate(int(m) for m in m_grid):
        failures = 0
        for rep in range(reps):
            U = uniform_direction_array(d, M, [seed, i, rep])
            failures += not is_delta_net(U, delta, probe)
        freq = failures / reps
        bound = bounds.net_failure_bound(d, M, delta)
        se = bounds.binomial_se(min(bound, 1.0), reps)
        rows.append({"d": d, "delta": delta, "M": M, "reps": reps, "failures": failures,
                     "frequency": freq, "bound": bound, "binomial_se": se,
                     "within_bound": freq <= bound + 3 * se})
    return rows


# -- tail experiment -----------------------------------------------------------

def run_tail_experiment(cfg: RateExperimentConfig, params: bounds.AssumptionParams, x_grid,
                        threads: int = 1, variant=bounds.ExponentVariant.LEMMA) -> list[dict]:
    """Empirical ``P[d_H > C x / sqrt(n)]`` against the deviation bound.

    Rows with ``x`` outside the bound's admissible interval are kept and
    marked; their bound is taken as 1.
    """
    if cfg.reps < 1:
        raise InvalidArgument("reps must be >= 1")
    rows = _error_rows(cfg, None, threads)
    d = cfg.dist.dim
    out = []
    for n in cfg.n_grid:
        vals = np.array([r["hausdorff"] for r in rows if r["n"] == n])
        for x in x_grid:
            x = float(x)
            thr = params.C * x / math.sqrt(n)
            exceed = float(np.mean(vals > thr))
            try:
                b = bounds.theorem2_bound(params, d, n, x, variant)
                in_domain, bound, log_bound = True, b.probability_bound, b.log_probability_bound
            except DomainError:
                in_domain, bound, log_bound = False, math.nan, math.nan
            effective = bound if in_domain else 1.0
            out.append({"n": n, "x": x, "threshold": thr, "reps": cfg.reps,
                        "exceedance": exceed, "in_domain": in_domain, "bound": bound,
                        "log_bound": log_bound, "satisfied": exceed <= effective})
    return out


# -- output files ----------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(rows: list[dict], path, columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


RATE_COLUMNS = ("n", "rep", "seed", "M", "hausdorff", "certified_error")
NET_COLUMNS = ("d", "delta", "M", "reps", "failures", "frequency", "bound", "binomial_se",
               "within_bound")
TAIL_COLUMNS = ("n", "x", "threshold", "reps", "exceedance", "in_domain", "bound", "log_bound",
                "satisfied")


def write_rate_outputs(result: RateResult, output_dir) -> tuple[Path, Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(result.rows, out / RATE_RAW, RATE_COLUMNS)
    with open(out / RATE_SUMMARY, "w") as fh:
        json.dump(result.summary(), fh, indent=2)
        fh.write("\n")
    return out / RATE_RAW, out / RATE_SUMMARY


def write_net_outputs(rows, output_dir) -> Path:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(rows, out / NET_RAW, NET_COLUMNS)
    return out / NET_RAW


def write_tail_outputs(rows, output_dir) -> Path:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(rows, out / TAIL_RAW, TAIL_COLUMNS)
    return out / TAIL_RAW


def default_threads() -> int:
    return os.cpu_count() or 1

