"""Dense simplex solver for ``max <c, x>`` subject to ``A x <= b``.

The variables ``x`` are free and the number of constraints ``m`` is usually
much larger than the dimension ``d``, so the solver works on the dual
standard-form program

    min <b, y>   subject to   A^T y = c,  y >= 0,

whose tableau has only ``d`` rows. The final basis names at most ``d``
constraints that are tight at the optimum, the primal point solves those
constraints as equalities, and the basic dual values are the nonnegative
weights expressing ``c`` in the cone of active normals.

Pivoting follows Bland's rule, so the result is a deterministic function of
the input. Emptiness is decided separately by a phase-1 program that
minimizes the largest constraint violation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyPolytopeError, InvalidArgument, SolverFailure, UnboundedPolytopeError
from .geom import HPolytope, canonical_directions

FEASIBILITY_TOL = 1e-9
TIGHT_TOL = 1e-8
_PIVOT_TOL = 1e-10
_RC_TOL = 1e-10


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class LpProblem:
    """``max <objective, x>`` subject to ``constraints @ x <= bounds``."""

    objective: np.ndarray
    constraints: np.ndarray
    bounds: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        A = np.asarray(self.constraints, dtype=float)
        b = np.asarray(self.bounds, dtype=float).ravel()
        if A.size == 0:
            A = np.zeros((0, c.size))
        if A.ndim != 2 or A.shape[1] != c.size or A.shape[0] != b.size:
            raise InvalidArgument(
                f"shape mismatch: objective {c.shape}, constraints {A.shape}, bounds {b.shape}")
        for name, arr in (("objective", c), ("constraints", A), ("bounds", b)):
            if not np.all(np.isfinite(arr)):
                raise InvalidArgument(f"{name} contains NaN or Inf")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", A)
        object.__setattr__(self, "bounds", b)

    @property
    def dim(self) -> int:
        return self.objective.size


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    value: float | None = None
    point: np.ndarray | None = None
    active_set: tuple = ()
    # basis constraints and their dual weights, sum w_j a_j = c
    basis: tuple = ()
    weights: tuple = ()
    iterations: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Standard-form tableau ``T y = r, y >= 0`` with a basis per row."""

    def __init__(self, T, r, basis, cap):
        self.T = T
        self.r = r
        self.basis = basis
        self.cap = cap
        self.iterations = 0

    def pivot(self, i, j):
        T, r = self.T, self.r
        p = T[i, j]
        T[i] /= p
        r[i] /= p
        col = T[:, j].copy()
        col[i] = 0.0
        nz = np.flatnonzero(col)
        if nz.size:
            T[nz] -= np.outer(col[nz], T[i])
            r[nz] -= col[nz] * r[i]
        np.maximum(r, 0.0, out=r)
        self.basis[i] = j

    def run(self, cost, allowed):
        """Minimize ``cost . y`` from the current basis; False if unbounded.

        ``allowed`` is the number of leading columns eligible to enter.
        """
        T, r = self.T, self.r
        while True:
            rc = cost[:allowed] - cost[self.basis] @ T[:, :allowed]
            scale = 1.0 + np.abs(cost[self.basis]).max(initial=0.0)
            cand = np.flatnonzero(rc < -_RC_TOL * scale)
            if cand.size == 0:
                return True
            j = int(cand[0])
            colj = T[:, j]
            rows = np.flatnonzero(colj > _PIVOT_TOL)
            if rows.size == 0:
                return False
            ratios = r[rows] / colj[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
            i = int(min(ties, key=lambda k: self.basis[k]))
            self.iterations += 1
            if self.iterations > self.cap:
                raise SolverFailure(f"simplex exceeded {self.cap} pivots")
            self.pivot(i, j)


def _dual_simplex(A, b, c):
    """Solve ``min b.y, A^T y = c, y >= 0``.

    Returns ``(status, basis, y_basis, iterations)`` with status one of
    ``"optimal"``, ``"dual-infeasible"``, ``"dual-unbounded"``.

    Bland's rule stays cycle-free under any fixed ordering of the
    variables; columns are ranked by decreasing ``<a_j, c>`` so that
    constraints facing the objective are tried first.
    """
    align = A @ c
    key = np.where(align > 0, b / np.maximum(align, 1e-300), np.inf)
    order = np.lexsort((-align, key))
    status, basis, yB, iters = _dual_simplex_ordered(A[order], b[order], c)
    if basis is not None:
        basis = order[basis]
    return status, basis, yB, iters


def _dual_simplex_ordered(A, b, c):
    m, d = A.shape
    sign = np.where(c < 0, -1.0, 1.0)
    T = np.hstack([A.T * sign[:, None], np.eye(d)])
    r = np.abs(c).astype(float)
    basis = np.arange(m, m + d)
    tab = _Tableau(T, r, basis, cap=50 * (m + d))

    phase1 = np.concatenate([np.zeros(m), np.ones(d)])
    tab.run(phase1, m + d)
    if tab.r[tab.basis >= m].sum() > FEASIBILITY_TOL * (1.0 + np.abs(c).sum()):
        return "dual-infeasible", None, None, tab.iterations

    # drive remaining artificials out; drop rows that are linearly dependent
    keep = []
    for i in range(d):
        if tab.basis[i] >= m:
            row = np.abs(tab.T[i, :m])
            j = int(np.argmax(row)) if m else -1
            if m and row[j] > _PIVOT_TOL:
                tab.pivot(i, j)
                keep.append(i)
        else:
            keep.append(i)
    tab.T = tab.T[keep][:, :m]
    tab.r = tab.r[keep]
    tab.basis = tab.basis[keep]

    if not tab.run(np.asarray(b, dtype=float), m):
        return "dual-unbounded", None, None, tab.iterations
    return "optimal", tab.basis.copy(), tab.r.copy(), tab.iterations


def _phase1_violation(A, b) -> tuple[float, np.ndarray]:
    """Smallest achievable ``max_j (a_j . x - b_j)^+`` and a minimizer."""
    m, d = A.shape
    A1 = np.zeros((m + 1, d + 1))
    A1[:m, :d] = A
    A1[:m, d] = -1.0
    A1[m, d] = -1.0
    b1 = np.concatenate([b, [0.0]])
    c1 = np.zeros(d + 1)
    c1[d] = -1.0
    status, basis, _, _ = _dual_simplex(A1, b1, c1)
    if status != "optimal":
        raise SolverFailure(f"phase-1 program returned {status}")
    z = _primal_point(A1, b1, basis)
    return max(float(z[d]), 0.0), z[:d]


def _primal_point(A, b, basis):
    AB = A[basis]
    if AB.shape[0] == A.shape[1]:
        try:
            return np.linalg.solve(AB, b[basis])
        except np.linalg.LinAlgError:
            pass
    return np.linalg.lstsq(AB, b[basis], rcond=None)[0] if AB.size else np.zeros(A.shape[1])


def is_feasible(A, b, tol: float = FEASIBILITY_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.shape[0] == 0:
        return True
    return _phase1_violation(A, b)[0] <= tol


def solve(p: LpProblem) -> LpSolution:
    """Maximize ``<c, x>`` over ``{x : A x <= b}``."""
    A, b, c = p.constraints, p.bounds, p.objective
    status, basis, yB, iters = _dual_simplex(A, b, c)
    if status == "optimal":
        x = _primal_point(A, b, basis)
        keep = yB > 1e-12
        slack = b - A @ x if A.shape[0] else np.zeros(0)
        active = tuple(int(j) for j in np.flatnonzero(np.abs(slack) <= TIGHT_TOL))
        return LpSolution(LpStatus.OPTIMAL, float(c @ x), x, active,
                          tuple(int(j) for j in basis[keep]),
                          tuple(float(w) for w in yB[keep]), iters)
    if status == "dual-unbounded" or not is_feasible(A, b):
        return LpSolution(LpStatus.INFEASIBLE, iterations=iters)
    return LpSolution(LpStatus.UNBOUNDED, iterations=iters)


class Unbounded(float):
    """Marker returned by :func:`support_function` for an unbounded LP."""

    def __new__(cls):
        return super().__new__(cls, np.inf)

    def __repr__(self):
        return "Unbounded()"


UNBOUNDED = Unbounded()


def _solve_direction(P: HPolytope, u) -> LpSolution:
    u = np.asarray(u, dtype=float).ravel()
    if u.size != P.dim:
        raise InvalidArgument(f"direction has dimension {u.size}, polytope {P.dim}")
    return solve(LpProblem(u / np.linalg.norm(u), P.normals, P.offsets))


def support_function(P: HPolytope, u):
    """``max <u, x>`` over ``P``; :data:`UNBOUNDED` (== inf) when unbounded.

    Raises :class:`EmptyPolytopeError` when ``P`` is infeasible.
    """
    sol = _solve_direction(P, u)
    if sol.status is LpStatus.INFEASIBLE:
        raise EmptyPolytopeError("support function of an empty polytope")
    if sol.status is LpStatus.UNBOUNDED:
        return UNBOUNDED
    return sol.value


def support_values(P: HPolytope, directions) -> np.ndarray:
    """Support function at each row of ``directions``; ``inf`` if unbounded."""
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    return np.array([support_function(P, u) for u in U], dtype=float)


def is_empty(P: HPolytope, tol: float = FEASIBILITY_TOL) -> bool:
    return not is_feasible(P.normals, P.offsets, tol)


def is_bounded(P: HPolytope) -> bool:
    """Bounded iff finite support in every canonical direction +-e_i.

    Any recession direction has positive inner product with some +-e_i, so
    the probe is complete. ``P`` must be nonempty.
    """
    return bool(np.all(np.isfinite(support_values(P, canonical_directions(P.dim)))))


def active_cone_certificate(P: HPolytope, u):
    """Optimal point and active constraints whose normals generate ``u``.

    Returns ``(x_star, indices, weights)`` with at most ``d`` indices, each
    constraint tight at ``x_star`` and ``sum w_j a_j = u``. When more than
    ``d`` constraints are tight the certificate is one valid choice among
    several. A non-optimal LP raises :class:`EmptyPolytopeError` or
    :class:`UnboundedPolytopeError`.
    """
    sol = _solve_direction(P, u)
    if sol.status is LpStatus.INFEASIBLE:
        raise EmptyPolytopeError("polytope is empty")
    if sol.status is LpStatus.UNBOUNDED:
        raise UnboundedPolytopeError("support LP is unbounded; no active cone exists")
    return sol.point, list(sol.basis), list(sol.weights)
