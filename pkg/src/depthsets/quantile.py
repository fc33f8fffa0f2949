"""Directional quantiles of point clouds and reference distributions.

For a level ``alpha`` and direction ``u`` the upper (1 - alpha)-quantile of
the projections ``p_i = <u, X_i>`` is

    sup { t : #{i : p_i >= t} >= n alpha },

which is the order statistic ``p_(n - ceil(n alpha) + 1)``. The lower
quantile ``inf { t : #{i : p_i <= t} >= n (1 - alpha) }`` is
``p_(ceil(n (1 - alpha)))``. Both index formulas use exact rational
arithmetic on ``alpha`` read as the nearest fraction with denominator at most
10^9, so ``alpha = 0.1`` means 1/10 and ``n alpha`` landing on an integer is
never misrounded.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import betainc, erf

from .errors import InvalidArgument
from .geom import Direction, PointCloud, as_cloud, direction_array


@dataclass(frozen=True)
class LevelSpec:
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a < 1.0) or math.isnan(a):
            raise InvalidArgument(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "alpha", a)


def as_level(level) -> LevelSpec:
    return level if isinstance(level, LevelSpec) else LevelSpec(level)


def alpha_fraction(alpha) -> Fraction:
    return Fraction(alpha).limit_denominator(10**9)


def _ceil_times(n: int, a) -> int:
    return math.ceil(n * alpha_fraction(a))


def upper_index(n: int, alpha: float) -> int:
    """1-based rank of the upper empirical (1 - alpha)-quantile."""
    return n - _ceil_times(n, alpha) + 1


def lower_index(n: int, alpha: float) -> int:
    """1-based rank of the lower empirical (1 - alpha)-quantile."""
    return max(1, math.ceil(n * (1 - alpha_fraction(alpha))))


def projections(cloud, directions) -> np.ndarray:
    """``m x n`` matrix of projections of the cloud on unit directions."""
    X = as_cloud(cloud).points
    U = direction_array(directions)
    if U.shape[1] != X.shape[1]:
        raise InvalidArgument(f"direction dimension {U.shape[1]} != cloud dimension {X.shape[1]}")
    return U @ X.T


def _kth(proj: np.ndarray, k: int) -> np.ndarray:
    return np.partition(proj, k - 1, axis=-1)[..., k - 1]


def upper_quantiles(cloud, directions, level) -> np.ndarray:
    """Upper empirical quantile for each direction (vectorized)."""
    alpha = as_level(level).alpha
    proj = projections(cloud, directions)
    return _kth(proj, upper_index(proj.shape[1], alpha))


def lower_quantiles(cloud, directions, level) -> np.ndarray:
    alpha = as_level(level).alpha
    proj = projections(cloud, directions)
    return _kth(proj, lower_index(proj.shape[1], alpha))


def empirical_upper_quantile(cloud: PointCloud, u, level) -> float:
    return float(upper_quantiles(cloud, [np.asarray(u, dtype=float)], level)[0])


def empirical_lower_quantile(cloud: PointCloud, u, level) -> float:
    return float(lower_quantiles(cloud, [np.asarray(u, dtype=float)], level)[0])


# -- analytic quantiles ----------------------------------------------------

def normal_cdf(t: float) -> float:
    return 0.5 * (1.0 + float(erf(t / math.sqrt(2.0))))


def normal_ppf(p: float, tol: float = 1e-12) -> float:
    """Inverse standard normal CDF by bisection on the erf-based CDF."""
    if not (0.0 < p < 1.0):
        raise InvalidArgument(f"probability must lie in (0, 1), got {p}")
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_spd(cov, d):
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (d, d) or not np.allclose(cov, cov.T):
        raise InvalidArgument("covariance must be a symmetric d x d matrix")
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise InvalidArgument("covariance is not positive definite") from None
    return cov


def gaussian_quantile(mean, cov, u, level) -> float:
    """Upper (1 - alpha)-quantile of <u, X> for X ~ N(mean, cov)."""
    mean = np.asarray(mean, dtype=float).ravel()
    cov = _check_spd(cov, mean.size)
    u = Direction(u).coords
    if u.size != mean.size:
        raise InvalidArgument("direction and mean dimensions differ")
    z = normal_ppf(1.0 - as_level(level).alpha)
    return float(u @ mean + z * math.sqrt(u @ cov @ u))


def _ball_projection_tail(t: float, d: int) -> float:
    """P[<u, X> >= t] for X uniform on the unit ball in R^d, via the
    regularized incomplete beta function of the marginal density
    proportional to (1 - t^2)^((d-1)/2)."""
    if t >= 1.0:
        return 0.0
    if t <= -1.0:
        return 1.0
    a = (d + 1) / 2.0
    # (1 + t) / 2 ~ Beta(a, a)
    return float(1.0 - betainc(a, a, (1.0 + t) / 2.0))


def uniform_ball_quantile(radius: float, d: int, level, tol: float = 1e-12) -> float:
    """The q with P[<u, X> >= q] = alpha for X uniform on B(0, radius)."""
    if radius <= 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    if d < 2:
        raise InvalidArgument(f"d must be >= 2, got {d}")
    alpha = as_level(level).alpha
    lo, hi = -1.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _ball_projection_tail(mid, d) > alpha:
            lo = mid
        else:
            hi = mid
    return radius * 0.5 * (lo + hi)


# -- quantile profiles -----------------------------------------------------

class Side(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class QuantileProfile:
    """Directional quantile map extended to R^d by positive homogeneity."""

    evaluator: Callable[[np.ndarray], float]
    level: LevelSpec
    dim: int
    side: Side = Side.UPPER

    def __call__(self, z) -> float:
        z = np.asarray(z, dtype=float).ravel()
        norm = float(np.linalg.norm(z))
        if norm == 0.0:
            return 0.0
        return norm * float(self.evaluator(z / norm))

    @classmethod
    def empirical(cls, cloud, level, side: Side = Side.UPPER) -> "QuantileProfile":
        cloud = as_cloud(cloud)
        level = as_level(level)
        fn = empirical_upper_quantile if side is Side.UPPER else empirical_lower_quantile
        return cls(lambda u: fn(cloud, u, level), level, cloud.dim, side)

    @classmethod
    def gaussian(cls, mean, cov, level) -> "QuantileProfile":
        mean = np.asarray(mean, dtype=float)
        cov = _check_spd(cov, mean.size)
        level = as_level(level)
        z = normal_ppf(1.0 - level.alpha)
        return cls(lambda u: float(u @ mean + z * math.sqrt(u @ cov @ u)), level, mean.size)


@dataclass(frozen=True)
class SubadditivityReport:
    pairs: int
    violations: int
    worst_gap: float


def subadditivity_probe(profile: QuantileProfile, pairs: int, seed,
                        tol: float = 1e-9) -> SubadditivityReport:
    """Test Q(u + v) <= Q(u) + Q(v) + tol on random unit pairs.

    ``worst_gap`` is the largest ``Q(u + v) - Q(u) - Q(v)`` seen; positive
    values above ``tol`` are counted as violations.
    """
    if pairs < 1:
        raise InvalidArgument("pairs must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((pairs, 2, profile.dim))
    g /= np.linalg.norm(g, axis=2, keepdims=True)
    violations = 0
    worst = -math.inf
    for u, v in g:
        gap = profile(u + v) - profile(u) - profile(v)
        worst = max(worst, gap)
        if gap > tol:
            violations += 1
    return SubadditivityReport(pairs, violations, worst)
