"""Tukey depth and its upper level sets for point clouds.

A level set ``{x : depth(x) >= alpha}`` of the empirical measure equals the
polyhedral set ``{x : <u, x> <= q_u for all unit u}`` where ``q_u`` is the
upper empirical (1 - alpha)-quantile in direction ``u``. Keeping only a
finite direction set gives an outer approximation; in the plane a finite set
of critical directions already gives the exact set.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import linprog
from .errors import InvalidArgument
from .geom import (HPolytope, PointCloud, SphereNet, as_cloud, canonical_directions,
                   deterministic_net, direction_array)
from .quantile import LevelSpec, alpha_fraction, as_level, upper_quantiles


class DepthValue(NamedTuple):
    """Depth as an exact ratio ``count / n`` (not reduced)."""

    count: int
    n: int

    @property
    def ratio(self) -> float:
        return self.count / self.n

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.count, self.n)

    def at_least(self, level) -> bool:
        return self.count >= self.n * alpha_fraction(as_level(level).alpha)

    def __str__(self):
        return f"{self.count}/{self.n}"


class Emptiness(enum.Enum):
    NONEMPTY = "nonempty"
    EMPTY = "empty"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LevelSetResult:
    polytope: HPolytope
    alpha: LevelSpec
    directions_used: int
    emptiness: Emptiness
    truncation: float | None = None


def _point(x, d):
    x = np.asarray(x, dtype=float).ravel()
    if x.size != d:
        raise InvalidArgument(f"point has dimension {x.size}, cloud has {d}")
    return x


def _require_2d(cloud):
    if cloud.dim != 2:
        raise InvalidArgument(f"exact planar algorithm needs d = 2, got d = {cloud.dim}")


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def depth_exact_2d(cloud, x) -> DepthValue:
    """Exact planar Tukey depth by an angular sweep, O(n log n).

    The depth is ``n`` minus the largest number of points in an open
    halfplane whose boundary passes through ``x``. Such a halfplane can be
    rotated until its boundary meets a point direction, so it suffices to
    count, for each distinct direction ``g``, the points whose direction lies
    in the half-open arc ``[g, g + pi)``.
    """
    cloud = as_cloud(cloud)
    _require_2d(cloud)
    x = _point(x, 2)
    V = cloud.points - x
    V = V[np.any(V != 0.0, axis=1)]
    n = cloud.n
    if V.shape[0] == 0:
        return DepthValue(n, n)

    order = np.argsort(np.arctan2(V[:, 1], V[:, 0]), kind="stable")
    V = V[order]
    # merge coincident directions
    groups, weights = [V[0]], [1]
    for v in V[1:]:
        g = groups[-1]
        if _cross(g, v) == 0.0 and g @ v > 0.0:
            weights[-1] += 1
        else:
            groups.append(v)
            weights.append(1)
    if len(groups) > 1 and _cross(groups[-1], groups[0]) == 0.0 and groups[-1] @ groups[0] > 0.0:
        weights[0] += weights.pop()
        groups.pop()

    m = len(groups)
    prefix = np.concatenate([[0], np.cumsum(weights + weights)])
    best = 0
    end = 1
    for k in range(m):
        end = max(end, k + 1)
        g = groups[k]
        while end < k + m and _cross(g, groups[end % m]) > 0.0:
            end += 1
        best = max(best, int(prefix[end] - prefix[k]))
    return DepthValue(n - best, n)


def depth_upper_bound(cloud, x, net) -> DepthValue:
    """Minimum halfspace count over the directions of ``net``.

    Restricting the infimum to finitely many directions can only raise it,
    so the result bounds the true depth from above.
    """
    cloud = as_cloud(cloud)
    U = direction_array(net)
    if U.shape[0] == 0:
        raise InvalidArgument("empty direction net")
    x = _point(x, cloud.dim)
    if U.shape[1] != cloud.dim:
        raise InvalidArgument("net and cloud dimensions differ")
    counts = ((cloud.points - x) @ U.T <= 0.0).sum(axis=0)
    return DepthValue(int(counts.min()), cloud.n)


def classify(P: HPolytope, tol: float = linprog.FEASIBILITY_TOL) -> Emptiness:
    if linprog.is_empty(P, tol):
        return Emptiness.EMPTY
    d = P.dim
    probes = np.vstack([canonical_directions(d), np.ones((1, d)), -np.ones((1, d))])
    vals = linprog.support_values(P, probes)
    return Emptiness.NONEMPTY if np.all(np.isfinite(vals)) else Emptiness.UNBOUNDED


def levelset_sampled(cloud, level, directions) -> LevelSetResult:
    """Outer approximation: one quantile constraint per given direction."""
    cloud = as_cloud(cloud)
    level = as_level(level)
    U = direction_array(directions)
    if U.shape[1] != cloud.dim:
        raise InvalidArgument("direction and cloud dimensions differ")
    P = HPolytope(U, upper_quantiles(cloud, U, level), cloud.dim)
    return LevelSetResult(P, level, U.shape[0], classify(P))


def critical_directions_2d(cloud) -> np.ndarray:
    """Directions where the order of projections can change, plus the axes
    and one mid-arc direction between each consecutive pair, sorted by angle."""
    cloud = as_cloud(cloud)
    _require_2d(cloud)
    X = cloud.points
    i, j = np.triu_indices(cloud.n, k=1)
    W = X[i] - X[j]
    W = W[np.any(W != 0.0, axis=1)]
    perp = np.column_stack([-W[:, 1], W[:, 0]])
    angles = np.concatenate([
        np.arctan2(perp[:, 1], perp[:, 0]),
        np.arctan2(-perp[:, 1], -perp[:, 0]),
        np.array([0.0, 0.5, 1.0, -0.5]) * math.pi,
    ])
    angles = np.unique(np.mod(angles, 2 * math.pi))
    nxt = np.concatenate([angles[1:], [angles[0] + 2 * math.pi]])
    mids = 0.5 * (angles + nxt)
    theta = np.sort(np.concatenate([angles, np.mod(mids, 2 * math.pi)]))
    return np.column_stack([np.cos(theta), np.sin(theta)])


def levelset_exact_2d(cloud, level) -> LevelSetResult:
    """Exact planar depth level set as an H-polytope.

    Between consecutive critical directions the quantile is the projection of
    one fixed sample point, so the constraint holds on the whole arc as soon
    as it holds at both ends; arcs are shorter than pi by construction.
    """
    cloud = as_cloud(cloud)
    _require_2d(cloud)
    return levelset_sampled(cloud, level, critical_directions_2d(cloud))


@dataclass(frozen=True)
class AgreementReport:
    points: int
    excluded: int
    disagreements: int
    inside_by_depth: int
    inside_by_quantile: int


def representations_agree(cloud, level, grid, tol: float = 1e-3,
                          net: SphereNet | None = None) -> AgreementReport:
    """Compare depth-based and quantile-based membership on grid points.

    Quantile membership uses the critical directions of the cloud together
    with a fine net. Points whose constraint slack is within ``tol`` of zero
    are treated as boundary points and not compared.
    """
    cloud = as_cloud(cloud)
    _require_2d(cloud)
    level = as_level(level)
    G = np.asarray(grid, dtype=float).reshape(-1, 2)
    if G.shape[0] == 0:
        return AgreementReport(0, 0, 0, 0, 0)
    if net is None:
        net = deterministic_net(2, 0.01)
    U = np.vstack([critical_directions_2d(cloud), direction_array(net)])
    P = HPolytope(U, upper_quantiles(cloud, U, level), 2)
    slack = P.slack(G)
    by_quantile = slack >= 0.0
    by_depth = np.array([depth_exact_2d(cloud, g).at_least(level) for g in G])
    boundary = np.abs(slack) <= tol
    disagree = (by_depth != by_quantile) & ~boundary
    return AgreementReport(G.shape[0], int(boundary.sum()), int(disagree.sum()),
                           int(by_depth.sum()), int(by_quantile.sum()))


@dataclass(frozen=True)
class AtomCheck:
    holds: bool
    atom: np.ndarray
    atom_depth: DepthValue
    emptiness: Emptiness

    def __bool__(self):
        return self.holds


def atom_levelset_check(cloud, level, tol: float = 1e-6,
                        net: SphereNet | None = None) -> AtomCheck:
    """Check that a heavy atom is the whole level set above 1/2.

    ``cloud`` must repeat one point more than half the time and ``alpha``
    must exceed 1/2. Holds when the atom has depth >= alpha and every support
    value of the exact level set on ``net`` matches the atom to ``tol``.
    """
    cloud = as_cloud(cloud)
    _require_2d(cloud)
    level = as_level(level)
    if level.alpha <= 0.5:
        raise InvalidArgument("atom check needs alpha > 1/2")
    uniq, counts = np.unique(cloud.points, axis=0, return_counts=True)
    k = int(np.argmax(counts))
    if 2 * counts[k] <= cloud.n:
        raise InvalidArgument("no point carries more than half of the sample")
    atom = uniq[k]
    atom_depth = depth_exact_2d(cloud, atom)
    result = levelset_exact_2d(cloud, level)
    if result.emptiness is not Emptiness.NONEMPTY:
        return AtomCheck(False, atom, atom_depth, result.emptiness)
    if net is None:
        net = deterministic_net(2, 0.01)
    U = direction_array(net)
    h = linprog.support_values(result.polytope, U)
    singleton = bool(np.all(np.abs(h - U @ atom) <= tol))
    return AtomCheck(atom_depth.at_least(level) and singleton, atom, atom_depth,
                     result.emptiness)


def _ball_halfspaces(d: int) -> np.ndarray:
    blocks = [canonical_directions(d)]
    if d <= 3:
        signs = np.array(list(itertools.product([1.0, -1.0], repeat=d)))
        blocks.append(signs / math.sqrt(d))
    return np.vstack(blocks)


def truncate(result: LevelSetResult, radius: float) -> LevelSetResult:
    """Intersect with an outer polyhedral approximation of ``B(0, radius)``.

    The ball is replaced by its circumscribed cube, plus the 2^d diagonal
    halfspaces for d <= 3. An empty input becomes the singleton ``{0}``.
    """
    if not radius > 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    P = result.polytope
    d = P.dim
    if result.emptiness is Emptiness.EMPTY:
        zero = HPolytope.box(np.zeros(d), np.zeros(d))
        return replace(result, polytope=zero, emptiness=Emptiness.NONEMPTY,
                       truncation=float(radius))
    B = _ball_halfspaces(d)
    Q = P.intersect(HPolytope(B, np.full(B.shape[0], float(radius)), d))
    return replace(result, polytope=Q, emptiness=classify(Q), truncation=float(radius))
