"""Directions, sphere nets, halfspaces and H-polytopes.

Distances on the sphere are Euclidean chords throughout. An angle ``a``
between two unit vectors corresponds to the chord ``2 sin(a / 2)``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidArgument

DEFAULT_TOL = 1e-9


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Direction:
    """A unit vector in R^d, d >= 2. Renormalized on construction."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float).ravel()
        if c.size < 2:
            raise InvalidArgument(f"direction needs d >= 2, got d={c.size}")
        if not np.all(np.isfinite(c)):
            raise InvalidArgument("direction has non-finite coordinates")
        norm = np.linalg.norm(c)
        if norm == 0.0:
            raise InvalidArgument("cannot normalize the zero vector")
        object.__setattr__(self, "coords", _frozen(c / norm))

    @property
    def dim(self) -> int:
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __eq__(self, other):
        return isinstance(other, Direction) and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())

    def __repr__(self):
        return f"Direction({np.array2string(self.coords, precision=6, separator=', ')})"


def direction_array(directions) -> np.ndarray:
    """Stack directions (Direction objects or rows) into a unit-row array."""
    if isinstance(directions, SphereNet):
        return directions.points
    if isinstance(directions, Direction):
        return directions.coords[None, :]
    arr = np.array([np.asarray(u, dtype=float) for u in directions], dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InvalidArgument("expected a non-empty list of directions")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms == 0) or not np.all(np.isfinite(arr)):
        raise InvalidArgument("directions must be finite and nonzero")
    return arr / norms[:, None]


@dataclass(frozen=True)
class Halfspace:
    """The closed halfspace {x : <normal, x> <= offset}."""

    normal: Direction
    offset: float

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        return float(np.dot(self.normal.coords, x)) <= self.offset + tol


class HPolytope:
    """Intersection of finitely many closed halfspaces in R^d.

    Stored as a normal matrix ``A`` (unit rows) and offsets ``b`` so that the
    polytope is ``{x : A x <= b}``. An empty constraint list is all of R^d.
    Duplicate or redundant rows are kept as given.
    """

    __slots__ = ("_A", "_b", "dim")

    def __init__(self, normals, offsets, dim: int | None = None):
        A = np.asarray(normals, dtype=float)
        b = np.asarray(offsets, dtype=float).ravel()
        if A.size == 0:
            if dim is None:
                raise InvalidArgument("dim is required for an empty constraint list")
            A = np.zeros((0, dim))
            b = np.zeros(0)
        if A.ndim != 2 or A.shape[0] != b.size:
            raise InvalidArgument("normals must be m x d and offsets length m")
        if dim is not None and A.shape[1] != dim:
            raise InvalidArgument(f"normals have {A.shape[1]} columns, expected {dim}")
        if A.shape[1] < 2:
            raise InvalidArgument("polytopes need d >= 2")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidArgument("polytope data must be finite")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0):
            raise InvalidArgument("zero normal vector")
        self._A = _frozen(A / norms[:, None])
        self._b = _frozen(b / norms)
        self.dim = A.shape[1]

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence[Halfspace], dim: int) -> "HPolytope":
        if not halfspaces:
            return cls(np.zeros((0, dim)), np.zeros(0), dim)
        A = [h.normal.coords for h in halfspaces]
        b = [h.offset for h in halfspaces]
        return cls(A, b, dim)

    @classmethod
    def box(cls, lower, upper) -> "HPolytope":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        d = lower.size
        eye = np.eye(d)
        return cls(np.vstack([eye, -eye]), np.concatenate([upper, -lower]))

    @property
    def normals(self) -> np.ndarray:
        return self._A

    @property
    def offsets(self) -> np.ndarray:
        return self._b

    @property
    def halfspaces(self) -> list[Halfspace]:
        return [Halfspace(Direction(a), float(t)) for a, t in zip(self._A, self._b)]

    def __len__(self):
        return self._b.size

    def translate(self, v) -> "HPolytope":
        v = np.asarray(v, dtype=float)
        return HPolytope(self._A, self._b + self._A @ v, self.dim)

    def intersect(self, other: "HPolytope") -> "HPolytope":
        if other.dim != self.dim:
            raise InvalidArgument("dimension mismatch")
        return HPolytope(np.vstack([self._A, other._A]),
                         np.concatenate([self._b, other._b]), self.dim)

    def slack(self, points) -> np.ndarray:
        """Minimum constraint slack ``min_j (b_j - <a_j, x>)`` per point."""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        if X.shape[1] != self.dim:
            raise InvalidArgument("dimension mismatch")
        if len(self) == 0:
            return np.full(X.shape[0], np.inf)
        return np.min(self._b[None, :] - X @ self._A.T, axis=1)

    def __repr__(self):
        return f"HPolytope(dim={self.dim}, constraints={len(self)})"


def polytope_contains(P: HPolytope, x, tol: float = DEFAULT_TOL) -> bool:
    """True iff every constraint of ``P`` holds at ``x`` up to ``tol``."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != P.dim:
        raise InvalidArgument(f"point has dimension {x.size}, polytope {P.dim}")
    if len(P) == 0:
        return True
    return bool(np.all(P.normals @ x <= P.offsets + tol))


class NetKind(enum.Enum):
    DETERMINISTIC = "deterministic-covering"
    UNIFORM = "uniform-random"


@dataclass(frozen=True, eq=False)
class SphereNet:
    """A finite direction set with its nominal covering radius ``delta``.

    For deterministic nets the chord distance from any unit vector to the
    nearest point is at most ``delta / 2`` by construction; for random nets
    ``delta`` is only the radius the caller is testing for.
    """

    points: np.ndarray
    delta: float
    kind: NetKind

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))

    @property
    def directions(self) -> list[Direction]:
        return [Direction(p) for p in self.points]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n sample points in R^d (the support of the empirical measure)."""

    points: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        X = np.array(self.points, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[0] < 1:
            raise InvalidArgument("a point cloud needs at least one point")
        if not np.all(np.isfinite(X)):
            raise InvalidArgument("point cloud contains non-finite values")
        object.__setattr__(self, "points", _frozen(X))
        object.__setattr__(self, "n", X.shape[0])

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def translate(self, v) -> "PointCloud":
        return PointCloud(self.points + np.asarray(v, dtype=float))

    def scale(self, c: float) -> "PointCloud":
        return PointCloud(self.points * c)


def as_cloud(cloud) -> PointCloud:
    return cloud if isinstance(cloud, PointCloud) else PointCloud(cloud)


# -- direction sampling and nets ---------------------------------------------

def uniform_direction_array(d: int, m: int, seed) -> np.ndarray:
    """``m`` i.i.d. uniform unit vectors in R^d as an ``m x d`` array."""
    if d < 2:
        raise InvalidArgument(f"d must be >= 2, got {d}")
    if m < 1:
        raise InvalidArgument(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    while True:
        g = rng.standard_normal((m, d))
        norms = np.linalg.norm(g, axis=1)
        # zero norm has probability 0; redraw the whole batch to stay seed-stable
        if np.all(norms > 0):
            return g / norms[:, None]


def uniform_directions(d: int, m: int, seed) -> list[Direction]:
    return [Direction(u) for u in uniform_direction_array(d, m, seed)]


def _circle_points(radius: float) -> np.ndarray:
    # spacing 4 arcsin(r/4) keeps every point of the circle within chord r/2
    r = min(radius, 2.0)
    count = max(2, math.ceil(2 * math.pi / (4 * math.asin(r / 4))))
    theta = 2 * math.pi * np.arange(count) / count
    return np.column_stack([np.cos(theta), np.sin(theta)])


def _covering_points(d: int, rho: float) -> np.ndarray:
    """Points on S^{d-1} with every unit vector within chord ``rho``."""
    if rho >= 2.0:
        out = np.zeros((1, d))
        out[0, 0] = 1.0
        return out
    if d == 2:
        return _circle_points(2 * rho)
    # latitude bands: u = (cos(phi) w, sin(phi)), w on S^{d-2}
    # chord(phi, phi_k) <= rho/2 and cos(phi_k) |w - w'| <= rho/2
    step = 4 * math.asin(rho / 4)
    bands = math.ceil(math.pi / step) + 1
    phis = np.linspace(-math.pi / 2, math.pi / 2, bands)
    blocks = []
    for phi in phis:
        c = math.cos(phi)
        if c < 1e-12:
            pole = np.zeros((1, d))
            pole[0, -1] = math.copysign(1.0, phi)
            blocks.append(pole)
            continue
        base = _covering_points(d - 1, (rho / 2) / c)
        blocks.append(np.column_stack([c * base, np.full(base.shape[0], math.sin(phi))]))
    return np.vstack(blocks)


def deterministic_net(d: int, delta: float) -> SphereNet:
    """A covering net of S^{d-1}; every unit vector lies within ``delta / 2``."""
    if d < 2:
        raise InvalidArgument(f"d must be >= 2, got {d}")
    if not (0 < delta <= 1):
        raise InvalidArgument(f"delta must lie in (0, 1], got {delta}")
    return SphereNet(_covering_points(d, delta / 2), float(delta), NetKind.DETERMINISTIC)


def is_delta_net(candidate, delta: float, probe: SphereNet) -> bool:
    """Conservative check that ``candidate`` is a delta-net.

    Every probe direction must lie within ``delta / 2`` of a candidate. With
    a probe of covering radius ``delta / 4`` (any ``deterministic_net(d,
    delta / 2)``) this implies covering radius ``3 delta / 4 <= delta``.
    """
    if candidate is None or len(candidate) == 0:
        return False
    pts = direction_array(candidate)
    if pts.shape[1] != probe.dim:
        raise InvalidArgument("candidate and probe dimensions differ")
    dist, _ = cKDTree(pts).query(probe.points, k=1)
    return bool(np.all(dist <= delta / 2))


def canonical_directions(d: int) -> np.ndarray:
    """The 2d directions +-e_i."""
    eye = np.eye(d)
    return np.vstack([eye, -eye])


# -- CSV formats ---------------------------------------------------------------

class CsvFormatError(InvalidArgument):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def _read_rows(path, header: bool) -> list[tuple[int, list[float]]]:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if header and lineno == 1:
                continue
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise CsvFormatError(path, lineno, f"non-numeric field in {row!r}") from None
            if not all(math.isfinite(v) for v in vals):
                raise CsvFormatError(path, lineno, "non-finite value")
            if rows and len(vals) != len(rows[0][1]):
                raise CsvFormatError(path, lineno,
                                     f"expected {len(rows[0][1])} columns, got {len(vals)}")
            rows.append((lineno, vals))
    return rows


def read_point_cloud(path, header: bool = False) -> PointCloud:
    """Load a point cloud: one point per row, d numeric columns."""
    rows = _read_rows(path, header)
    if not rows:
        raise CsvFormatError(path, 0, "no points")
    if len(rows[0][1]) < 2:
        raise CsvFormatError(path, rows[0][0], "points need at least 2 coordinates")
    return PointCloud(np.array([r for _, r in rows]))


def read_polytope(path, header: bool = False, dim: int | None = None) -> HPolytope:
    """Load an H-polytope: rows ``u_1,...,u_d,t``; normals are renormalized."""
    rows = _read_rows(path, header)
    if not rows:
        if dim is None:
            raise CsvFormatError(path, 0, "empty polytope file needs an explicit dimension")
        return HPolytope(np.zeros((0, dim)), np.zeros(0), dim)
    if len(rows[0][1]) < 3:
        raise CsvFormatError(path, rows[0][0], "rows need d+1 >= 3 columns")
    for lineno, r in rows:
        if not any(r[:-1]):
            raise CsvFormatError(path, lineno, "zero normal vector")
    data = np.array([r for _, r in rows])
    return HPolytope(data[:, :-1], data[:, -1])


def format_number(x: float) -> str:
    return format(float(x), ".12g")


def write_polytope(P: HPolytope, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for a, t in zip(P.normals, P.offsets):
            w.writerow([repr(float(v) + 0.0) for v in a] + [repr(float(t) + 0.0)])


def write_point_cloud(cloud: PointCloud, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for p in cloud.points:
            w.writerow([repr(float(v) + 0.0) for v in p])
