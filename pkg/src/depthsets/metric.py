"""Hausdorff distance between convex polytopes through support functions.

For convex bodies ``d_H(P, Q) = sup_u |h_P(u) - h_Q(u)|`` over unit ``u``.
Sampling the supremum on a net of covering radius ``delta`` underestimates
it by at most ``2 R delta / (1 - delta)`` when both bodies lie in
``B(0, R)``, because support functions of such bodies are R-Lipschitz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linprog
from .errors import InvalidArgument
from .geom import HPolytope, SphereNet, canonical_directions


@dataclass(frozen=True)
class HausdorffEstimate:
    value: float
    certified_error: float
    net_delta: float
    r_in: float
    R_out: float

    @property
    def upper(self) -> float:
        return self.value + self.certified_error


def _checked_support(P: HPolytope, U: np.ndarray, name: str) -> np.ndarray:
    if linprog.is_empty(P):
        raise InvalidArgument(f"{name} is empty (status: empty)")
    h = linprog.support_values(P, U)
    if not np.all(np.isfinite(h)):
        raise InvalidArgument(f"{name} is unbounded (status: unbounded)")
    return h


def outer_radius(P: HPolytope, canonical_support=None) -> float:
    """Radius of a ball around 0 containing ``P``: sqrt(d) times the largest
    canonical support value (the polytope sits in that cube)."""
    h = canonical_support if canonical_support is not None else \
        linprog.support_values(P, canonical_directions(P.dim))
    return math.sqrt(P.dim) * max(float(np.max(np.abs(h))), 0.0)


def _inner_radius(h_pos, h_neg) -> float:
    # half the smallest box width: a crude inscribed size used only for reporting
    widths = np.asarray(h_pos) + np.asarray(h_neg)
    return max(0.5 * float(np.min(widths)), 0.0)


def support_table(P: HPolytope, net: SphereNet, name: str = "polytope"):
    """Support values on ``net`` and on the canonical directions, checked."""
    d = P.dim
    U = np.vstack([canonical_directions(d), net.points])
    h = _checked_support(P, U, name)
    return h[2 * d:], h[:2 * d]


def hausdorff_from_tables(hP, canP, hQ, canQ, delta: float, d: int) -> HausdorffEstimate:
    value = float(np.max(np.abs(hP - hQ)))
    R = max(math.sqrt(d) * float(np.max(np.abs(canP))), math.sqrt(d) * float(np.max(np.abs(canQ))))
    cert = 2.0 * R * delta / (1.0 - delta) if delta < 1 else math.inf
    r_in = min(_inner_radius(canP[:d], canP[d:]), _inner_radius(canQ[:d], canQ[d:]))
    return HausdorffEstimate(value, cert, delta, r_in, R)


def hausdorff_support(P: HPolytope, Q: HPolytope, net: SphereNet) -> HausdorffEstimate:
    """Net estimate of ``d_H(P, Q)``; the true distance lies in
    ``[value, value + certified_error]``.

    Both polytopes must be nonempty and bounded, otherwise
    :class:`InvalidArgument` names the offending status.
    """
    if P.dim != Q.dim or P.dim != net.dim:
        raise InvalidArgument("dimension mismatch between polytopes and net")
    hP, canP = support_table(P, net, "first polytope")
    hQ, canQ = support_table(Q, net, "second polytope")
    return hausdorff_from_tables(hP, canP, hQ, canQ, net.delta, P.dim)


def _check_radii(eta, r, R):
    if not (0 <= eta < r):
        raise InvalidArgument(f"need 0 <= eta < r, got eta={eta}, r={r}")
    if not (r <= R):
        raise InvalidArgument(f"need r <= R, got r={r}, R={R}")


def quantile_deviation_to_hausdorff(eta: float, r: float, R: float) -> float:
    """Distance bound between the sets cut out by two quantile profiles
    that differ by at most ``eta``, when ``B(0, r) <= G <= B(0, R)``."""
    _check_radii(eta, r, R)
    t = eta / r
    return eta * R / r * (1 + t) / (1 - t)


def discretized_deviation_bound(eta: float, r: float, R: float, delta: float) -> float:
    """As :func:`quantile_deviation_to_hausdorff`, with constraints kept only
    on a ``delta``-net, which adds ``2 R delta / (1 - delta)``."""
    if not (0 < delta < 1):
        raise InvalidArgument(f"delta must lie in (0, 1), got {delta}")
    return quantile_deviation_to_hausdorff(eta, r, R) + 2 * R * delta / (1 - delta)
