"""Finite-sample bound formulas for depth level-set estimation.

Evaluators only: each function returns the value of a closed-form bound
so experiments can set empirical frequencies beside it. Bounds above 1 are
returned unclamped and flagged ``vacuous``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, InvalidArgument
from .quantile import normal_ppf


@dataclass(frozen=True)
class AssumptionParams:
    """Regularity constants of the population distribution.

    ``epsilon`` and ``L``: every directional CDF grows at slope at least
    ``L`` within ``epsilon`` of its quantile. ``r``, ``R``, ``a``: the
    population level set contains ``B(a, r)`` and lies in ``B(a, R)``.
    """

    epsilon: float
    L: float
    r: float
    R: float
    a: tuple = ()
    tau: float | None = None

    def __post_init__(self):
        if not (0 < self.epsilon < self.r <= self.R):
            raise InvalidArgument(
                f"need 0 < epsilon < r <= R, got {self.epsilon}, {self.r}, {self.R}")
        if not self.L > 0:
            raise InvalidArgument(f"L must be positive, got {self.L}")
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))

    @property
    def C(self) -> float:
        t = self.epsilon / self.r
        return self.R / self.r * (1 + t) / (1 - t)


class ExponentVariant(enum.Enum):
    # linear term 10 sqrt(5(d+1)) L x (uniform quantile deviation lemma)
    LEMMA = "lemma"
    # linear term 10 sqrt(5(d+1)) x, as displayed in the deviation theorem
    THEOREM = "theorem"


@dataclass(frozen=True)
class BoundEval:
    x: float
    probability_bound: float
    log_probability_bound: float
    radius_bound: float
    C: float
    A: float
    log_A: float

    @property
    def vacuous(self) -> bool:
        return self.log_probability_bound >= 0.0

    @property
    def constants(self) -> dict:
        return {"C": self.C, "A": self.A}


def log_A(d: int) -> float:
    return -250.0 * (d + 1)


def vc_term(d: int) -> float:
    return 10.0 * math.sqrt(5.0 * (d + 1))


def theorem2_domain(params: AssumptionParams, d: int, n: int) -> tuple[float, float]:
    """Half-open interval ``[low, high)`` of admissible ``x``; may be empty."""
    return vc_term(d) / params.L, params.epsilon * math.sqrt(n)


def theorem2_bound(params: AssumptionParams, d: int, n: int, x: float,
                   variant: ExponentVariant = ExponentVariant.LEMMA) -> BoundEval:
    """Tail bound ``P[d_H(G_hat, G) > C x / sqrt(n)] <= A exp(...)``.

    ``A = exp(-250 (d + 1))`` underflows double precision for every d >= 2,
    so the bound is carried in log form as well.
    """
    low, high = theorem2_domain(params, d, n)
    if not (low <= x < high):
        raise DomainError(
            f"x={x} outside the admissible interval [{low:.6g}, {high:.6g})"
            + (" (empty: n too small)" if low >= high else ""), (low, high))
    variant = ExponentVariant(variant)
    slope = params.L if variant is ExponentVariant.LEMMA else 1.0
    logb = log_A(d) - params.L ** 2 * x ** 2 / 2 + vc_term(d) * slope * x
    prob = math.exp(logb) if logb < 709.0 else math.inf
    return BoundEval(x=float(x), probability_bound=prob, log_probability_bound=logb,
                     radius_bound=params.C * x / math.sqrt(n), C=params.C,
                     A=math.exp(log_A(d)), log_A=log_A(d))


def net_failure_bound(d: int, M: int, delta: float) -> float:
    """Bound on the probability that ``M`` uniform directions fail to form a
    ``delta``-net of the sphere in R^d."""
    if d < 2:
        raise InvalidArgument(f"d must be >= 2, got {d}")
    if M < 1:
        raise InvalidArgument(f"M must be >= 1, got {M}")
    if not (0 < delta <= 1):
        raise InvalidArgument(f"delta must lie in (0, 1], got {delta}")
    expo = -M * delta ** (d - 1) / (2 * d * 8 ** ((d - 1) / 2)) + d * math.log(1 / delta)
    return 6.0 ** d * math.exp(expo)


def corollary4_threshold(d: int, n: int, k: float) -> float:
    return 2 * d * 8 ** ((d - 1) / 2) * (d + k) / 2 * float(n) ** (d - 1) * math.log(n)


def corollary4_directions(d: int, n: int, k: float) -> int:
    """Smallest integer number of random directions strictly above the
    threshold that keeps the sampled level set at the parametric rate."""
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    if d < 2 or k < 0:
        raise InvalidArgument("need d >= 2 and k >= 0")
    try:
        thr = corollary4_threshold(d, n, k)
    except OverflowError:
        raise CapacityError("threshold overflows double precision", math.inf) from None
    if not math.isfinite(thr) or thr >= 2.0 ** 62:
        raise CapacityError(f"threshold {thr:.6g} exceeds the integer range", thr)
    return math.floor(thr) + 1


def binomial_se(p: float, reps: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / reps)


def gaussian_assumption_params(alpha: float, sigma: float = 1.0, epsilon: float | None = None,
                               d: int = 2) -> AssumptionParams:
    """Constants for an isotropic Gaussian, whose level set is the centred
    ball of radius ``rho = sigma z`` with ``z`` the (1 - alpha) normal quantile.

    Then ``r = R = rho``; ``L`` is the smallest projected density on
    ``[rho - epsilon, rho + epsilon]``, attained at the right end since the
    quantile is positive for alpha < 1/2.
    """
    rho = sigma * normal_ppf(1 - alpha)
    if epsilon is None:
        epsilon = rho / 2
    t = max(abs(rho - epsilon), abs(rho + epsilon)) / sigma
    L = math.exp(-t * t / 2) / (sigma * math.sqrt(2 * math.pi))
    return AssumptionParams(epsilon, L, rho, rho, tuple(np.zeros(d)))
