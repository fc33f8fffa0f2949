"""Reference distributions with known depth level sets.

Samplers are deterministic functions of their seed. The population level-set
oracle covers Gaussians and uniform balls; both are centrally symmetric, so
their maximal depth is 1/2 and the level set at ``alpha > 1/2`` is empty.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import linprog
from .errors import DegeneratePolytopeError, InvalidArgument, UnsupportedDistribution
from .geom import HPolytope, PointCloud, canonical_directions, deterministic_net, direction_array
from .quantile import as_level, normal_ppf, uniform_ball_quantile

ORACLE_NET_DELTA = {2: 0.001, 3: 0.02}


class Kind(enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM_BALL = "uniform-ball"
    UNIFORM_POLYTOPE = "uniform-polytope"
    ATOM_MIXTURE = "atom-mixture"


@dataclass(frozen=True, eq=False)
class ReferenceDistribution:
    kind: Kind
    dim: int
    params: dict = field(default_factory=dict)

    @classmethod
    def gaussian(cls, mean, cov=None) -> "ReferenceDistribution":
        mean = np.asarray(mean, dtype=float).ravel()
        d = mean.size
        cov = np.eye(d) if cov is None else np.asarray(cov, dtype=float)
        if cov.shape != (d, d) or not np.allclose(cov, cov.T):
            raise InvalidArgument("covariance must be symmetric d x d")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise InvalidArgument("covariance is not positive definite") from None
        return cls(Kind.GAUSSIAN, d, {"mean": mean, "cov": cov, "chol": chol})

    @classmethod
    def uniform_ball(cls, center, radius: float) -> "ReferenceDistribution":
        center = np.asarray(center, dtype=float).ravel()
        if not radius > 0:
            raise InvalidArgument(f"radius must be positive, got {radius}")
        return cls(Kind.UNIFORM_BALL, center.size, {"center": center, "radius": float(radius)})

    @classmethod
    def uniform_polytope(cls, polytope: HPolytope) -> "ReferenceDistribution":
        return cls(Kind.UNIFORM_POLYTOPE, polytope.dim, {"polytope": polytope})

    @classmethod
    def atom_mixture(cls, points, weights, background: "ReferenceDistribution | None" = None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        weights = np.asarray(weights, dtype=float).ravel()
        if weights.size != points.shape[0] or np.any(weights < 0):
            raise InvalidArgument("need one nonnegative weight per atom")
        total = float(weights.sum())
        if total > 1 + 1e-12:
            raise InvalidArgument(f"atom weights sum to {total} > 1")
        if total < 1 - 1e-12 and background is None:
            raise InvalidArgument("atom weights below 1 need a background distribution")
        if background is not None and background.dim != points.shape[1]:
            raise InvalidArgument("background dimension differs from atoms")
        return cls(Kind.ATOM_MIXTURE, points.shape[1],
                   {"points": points, "weights": weights, "background": background})

    @property
    def is_logconcave(self) -> bool:
        return self.kind in (Kind.GAUSSIAN, Kind.UNIFORM_BALL, Kind.UNIFORM_POLYTOPE)

    def centroid(self):
        if self.kind is Kind.GAUSSIAN:
            return self.params["mean"]
        if self.kind is Kind.UNIFORM_BALL:
            return self.params["center"]
        return None


def distribution_from_config(cfg: dict[str, Any]) -> ReferenceDistribution:
    """Build a distribution from ``{"kind", "dim", "params"}``.

    Params per kind: gaussian ``mean`` (default 0), ``cov`` (default I);
    uniform-ball ``center`` (default 0), ``radius`` (default 1);
    uniform-polytope ``normals`` and ``offsets``;
    atom-mixture ``points``, ``weights`` and optional ``background`` (a
    nested config).
    """
    try:
        kind = Kind(cfg["kind"])
    except (KeyError, ValueError):
        raise InvalidArgument(f"unknown distribution kind {cfg.get('kind')!r}") from None
    d = int(cfg.get("dim", 2))
    p = cfg.get("params", {}) or {}
    if kind is Kind.GAUSSIAN:
        return ReferenceDistribution.gaussian(p.get("mean", [0.0] * d), p.get("cov"))
    if kind is Kind.UNIFORM_BALL:
        return ReferenceDistribution.uniform_ball(p.get("center", [0.0] * d), p.get("radius", 1.0))
    if kind is Kind.UNIFORM_POLYTOPE:
        return ReferenceDistribution.uniform_polytope(HPolytope(p["normals"], p["offsets"]))
    bg = p.get("background")
    return ReferenceDistribution.atom_mixture(
        p["points"], p["weights"], distribution_from_config(bg) if bg else None)


def _bounding_box(P: HPolytope):
    h = linprog.support_values(P, canonical_directions(P.dim))
    if not np.all(np.isfinite(h)):
        raise DegeneratePolytopeError("polytope is unbounded")
    return -h[P.dim:], h[:P.dim]


def _sample_polytope(P: HPolytope, n: int, rng) -> np.ndarray:
    if linprog.is_empty(P):
        raise DegeneratePolytopeError("polytope is empty")
    lo, hi = _bounding_box(P)
    trial = rng.uniform(lo, hi, size=(100_000, P.dim))
    rate = float(np.mean(np.all(trial @ P.normals.T <= P.offsets, axis=1)))
    if rate < 1e-4:
        raise DegeneratePolytopeError(f"rejection acceptance rate {rate:.2e} below 1e-4")
    out = []
    have = 0
    while have < n:
        batch = rng.uniform(lo, hi, size=(max(1024, int(1.2 * (n - have) / rate)), P.dim))
        keep = batch[np.all(batch @ P.normals.T <= P.offsets, axis=1)]
        out.append(keep)
        have += keep.shape[0]
    return np.vstack(out)[:n]


def _draw(dist: ReferenceDistribution, n: int, rng) -> np.ndarray:
    d = dist.dim
    if dist.kind is Kind.GAUSSIAN:
        return dist.params["mean"] + rng.standard_normal((n, d)) @ dist.params["chol"].T
    if dist.kind is Kind.UNIFORM_BALL:
        g = rng.standard_normal((n, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = dist.params["radius"] * rng.uniform(size=n) ** (1.0 / d)
        return dist.params["center"] + g * rad[:, None]
    if dist.kind is Kind.UNIFORM_POLYTOPE:
        return _sample_polytope(dist.params["polytope"], n, rng)
    pts, w = dist.params["points"], dist.params["weights"]
    probs = np.append(w, max(0.0, 1.0 - w.sum()))
    probs /= probs.sum()
    label = rng.choice(probs.size, size=n, p=probs)
    X = np.empty((n, d))
    atom = label < pts.shape[0]
    X[atom] = pts[label[atom]]
    rest = int((~atom).sum())
    if rest:
        X[~atom] = _draw(dist.params["background"], rest, rng)
    return X


def sample(dist: ReferenceDistribution, n: int, seed) -> PointCloud:
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    return PointCloud(_draw(dist, n, np.random.default_rng(seed)))


# -- population level sets -------------------------------------------------

class LevelSetKind(enum.Enum):
    BALL = "ball"
    HPOLYTOPE = "hpolytope-approx"


@dataclass(frozen=True, eq=False)
class PopulationLevelSet:
    kind: LevelSetKind
    alpha: float
    center: np.ndarray | None = None
    radius: float | None = None
    polytope: HPolytope | None = None
    # slack of the polyhedral outer approximation, if built from a net
    approx_error: float = 0.0

    def to_polytope(self, delta: float | None = None) -> tuple[HPolytope, float]:
        """H-polytope version and the Hausdorff error of the conversion."""
        if self.kind is LevelSetKind.HPOLYTOPE:
            return self.polytope, self.approx_error
        d = self.center.size
        delta = delta if delta is not None else ORACLE_NET_DELTA.get(d, 0.05)
        U = deterministic_net(d, delta).points
        P = HPolytope(U, U @ self.center + self.radius, d)
        R = float(np.linalg.norm(self.center)) + self.radius
        return P, 2 * R * delta / (1 - delta)

    def support(self, U) -> np.ndarray:
        U = direction_array(U)
        if self.kind is LevelSetKind.BALL:
            return U @ self.center + self.radius
        return linprog.support_values(self.polytope, U)


def population_levelset(dist: ReferenceDistribution, level, net_delta: float | None = None
                        ) -> PopulationLevelSet:
    """Depth level set of a Gaussian or uniform-ball distribution.

    Isotropic Gaussians and balls give a ball; a general Gaussian gives the
    polytope cut out by its analytic quantiles on a fine net.
    """
    alpha = as_level(level).alpha
    if dist.kind not in (Kind.GAUSSIAN, Kind.UNIFORM_BALL):
        raise UnsupportedDistribution(f"no population oracle for {dist.kind.value}")
    if alpha > 0.5:
        raise UnsupportedDistribution(
            f"alpha={alpha} exceeds the maximal depth 1/2 of a symmetric atomless law: "
            "the level set is empty")
    d = dist.dim
    if dist.kind is Kind.UNIFORM_BALL:
        rho = uniform_ball_quantile(dist.params["radius"], d, alpha)
        return PopulationLevelSet(LevelSetKind.BALL, alpha, dist.params["center"], rho)
    mean, cov = dist.params["mean"], dist.params["cov"]
    sigma2 = cov[0, 0]
    if np.allclose(cov, sigma2 * np.eye(d), rtol=0, atol=1e-14 * max(1.0, sigma2)):
        rho = math.sqrt(sigma2) * normal_ppf(1 - alpha)
        return PopulationLevelSet(LevelSetKind.BALL, alpha, mean, rho)
    delta = net_delta if net_delta is not None else ORACLE_NET_DELTA.get(d, 0.05)
    U = deterministic_net(d, delta).points
    z = normal_ppf(1 - alpha)
    q = U @ mean + z * np.sqrt(np.einsum("ij,jk,ik->i", U, cov, U))
    P = HPolytope(U, q, d)
    R = float(np.linalg.norm(mean)) + z * math.sqrt(float(np.linalg.eigvalsh(cov).max()))
    return PopulationLevelSet(LevelSetKind.HPOLYTOPE, alpha, polytope=P,
                              approx_error=2 * abs(R) * delta / (1 - delta))


@dataclass(frozen=True)
class CentroidDepth:
    min_mass: float
    standard_error: float
    samples: int
    directions: int
    threshold: float = math.exp(-1)

    @property
    def passes(self) -> bool:
        return self.min_mass >= self.threshold - 3 * self.standard_error


def logconcave_centroid_depth_check(dist: ReferenceDistribution, trials: int, seed,
                                    samples: int = 200_000) -> CentroidDepth:
    """Monte Carlo minimum mass of halfspaces bounded by a hyperplane
    through the centroid, over ``trials`` random directions.

    The centroid is exact for Gaussians and balls and is the mean of an
    independent sample otherwise.
    """
    if not dist.is_logconcave:
        raise InvalidArgument(f"{dist.kind.value} is not log-concave")
    if trials < 1 or samples < 2:
        raise InvalidArgument("need trials >= 1 and samples >= 2")
    rng = np.random.default_rng(seed)
    c = dist.centroid()
    if c is None:
        c = _draw(dist, samples, rng).mean(axis=0)
    X = _draw(dist, samples, rng) - c
    U = rng.standard_normal((trials, dist.dim))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    masses = np.array([float(np.mean(X @ u >= 0.0)) for u in U])
    pmin = float(masses.min())
    return CentroidDepth(pmin, math.sqrt(pmin * (1 - pmin) / samples), samples, trials)

