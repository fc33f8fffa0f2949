import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depthsets import linprog
from depthsets.errors import EmptyPolytopeError, InvalidArgument, UnboundedPolytopeError
from depthsets.geom import HPolytope
from depthsets.linprog import LpProblem, LpStatus, active_cone_certificate, solve, support_function

from oracles import random_polygon, support_by_vertices


def check_optimal(p, sol):
    A, b, c = p.constraints, p.bounds, p.objective
    assert np.all(A @ sol.point <= b + 1e-8)
    assert abs(sol.value - c @ sol.point) <= 1e-8
    for j in sol.active_set:
        assert abs(A[j] @ sol.point - b[j]) <= 1e-8


class TestSolve:
    def test_box(self):
        p = LpProblem([1, 0], np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))
        sol = solve(p)
        assert sol.status is LpStatus.OPTIMAL and sol.value == pytest.approx(1)
        check_optimal(p, sol)

    def test_infeasible(self):
        sol = solve(LpProblem([1, 0], [[1, 0], [-1, 0]], [-1, -2]))
        assert sol.status is LpStatus.INFEASIBLE

    def test_unbounded(self):
        sol = solve(LpProblem([1, 0], [[0, 1]], [0]))
        assert sol.status is LpStatus.UNBOUNDED

    def test_no_constraints_unbounded(self):
        assert solve(LpProblem([0, 1], np.zeros((0, 2)), [])).status is LpStatus.UNBOUNDED

    def test_zero_objective_optimal(self):
        sol = solve(LpProblem([0, 0], [[1, 0], [0, 1]], [1, 1]))
        assert sol.status is LpStatus.OPTIMAL and sol.value == 0

    @pytest.mark.parametrize("field", ["objective", "constraints", "bounds"])
    def test_nan_rejected(self, field):
        data = {"objective": [1.0, 0.0], "constraints": [[1.0, 0.0]], "bounds": [1.0]}
        data[field] = np.where(np.ones_like(np.asarray(data[field])), np.nan, 0)
        with pytest.raises(InvalidArgument):
            LpProblem(**data)

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        A, b = random_polygon(rng, 12)
        p = LpProblem([0.3, -0.7], A, b)
        s1, s2 = solve(p), solve(p)
        assert s1.active_set == s2.active_set and np.array_equal(s1.point, s2.point)

    def test_degenerate_many_tight(self):
        # all 8 constraints pass through (1, 1)
        ang = np.linspace(0.1, 1.4, 8)
        A = np.column_stack([np.cos(ang), np.sin(ang)])
        b = A @ np.array([1.0, 1.0])
        A = np.vstack([A, -np.eye(2)])
        b = np.concatenate([b, [5, 5]])
        p = LpProblem([1, 1], A, b)
        sol = solve(p)
        assert sol.value == pytest.approx(2.0, abs=1e-9)
        check_optimal(p, sol)
        assert len(sol.active_set) == 8

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_status_exclusive_and_consistent(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 7))
        A = rng.normal(size=(m, 2))
        b = rng.normal(size=m)
        c = rng.normal(size=2)
        p = LpProblem(c, A, b)
        sol = solve(p)
        feasible = linprog.is_feasible(A, b)
        if sol.status is LpStatus.INFEASIBLE:
            assert not feasible
        else:
            assert feasible
        if sol.status is LpStatus.OPTIMAL:
            check_optimal(p, sol)


class TestSupport:
    def test_unit_square(self, unit_square):
        assert support_function(unit_square, [1, 0]) == pytest.approx(1)
        assert support_function(unit_square, [1 / math.sqrt(2)] * 2) == pytest.approx(math.sqrt(2))

    def test_triangle(self, triangle):
        assert support_function(triangle, [1, 1]) == pytest.approx(1 / math.sqrt(2))

    def test_empty_raises(self):
        P = HPolytope([[1, 0], [-1, 0]], [-1, -2])
        with pytest.raises(EmptyPolytopeError):
            support_function(P, [1, 0])

    def test_unbounded_flag(self):
        P = HPolytope([[0, 1]], [0])
        h = support_function(P, [1, 0])
        assert h is linprog.UNBOUNDED and math.isinf(h)

    def test_against_vertices(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            A, b = random_polygon(rng)
            P = HPolytope(A, b)
            for u in rng.normal(size=(5, 2)):
                u = u / np.linalg.norm(u)
                assert abs(support_function(P, u) - support_by_vertices(P.normals, P.offsets, u)) <= 1e-8

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_homogeneous_extension_subadditive(self, seed):
        rng = np.random.default_rng(seed)
        A, b = random_polygon(rng)
        P = HPolytope(A, b)

        def H(z):
            r = np.linalg.norm(z)
            return 0.0 if r == 0 else r * support_function(P, z / r)

        u, v = rng.normal(size=(2, 2))
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        assert H(u + v) <= H(u) + H(v) + 1e-8

    def test_large_m(self):
        # many redundant constraints of a fine circumscribed polygon
        t = np.linspace(0, 2 * math.pi, 5000, endpoint=False)
        A = np.column_stack([np.cos(t), np.sin(t)])
        P = HPolytope(A, np.ones(5000))
        assert support_function(P, [1, 0]) == pytest.approx(1.0, abs=1e-9)
        assert linprog.is_bounded(P) and not linprog.is_empty(P)


class TestCertificate:
    def check(self, P, u, x, idx, w):
        u = np.asarray(u, dtype=float) / np.linalg.norm(u)
        assert len(idx) <= P.dim
        assert np.all(np.asarray(w) >= 0)
        assert np.allclose(np.asarray(w) @ P.normals[idx], u, atol=1e-6)
        for j in idx:
            assert abs(P.normals[j] @ x - P.offsets[j]) <= 1e-8

    def test_square_facet(self, unit_square):
        x, idx, w = active_cone_certificate(unit_square, [1, 0])
        assert idx == [0] and w == pytest.approx([1.0]) and x[0] == pytest.approx(1)
        self.check(unit_square, [1, 0], x, idx, w)

    def test_square_corner(self, unit_square):
        u = [1 / math.sqrt(2)] * 2
        x, idx, w = active_cone_certificate(unit_square, u)
        assert sorted(idx) == [0, 1]
        assert w == pytest.approx([1 / math.sqrt(2)] * 2)
        self.check(unit_square, u, x, idx, w)

    def test_triangle_bottom(self, triangle):
        x, idx, w = active_cone_certificate(triangle, [0, -1])
        assert idx == [1] and w == pytest.approx([1.0])

    def test_random(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            P = HPolytope(*random_polygon(rng))
            u = rng.normal(size=2)
            self.check(P, u, *active_cone_certificate(P, u))

    def test_errors(self):
        with pytest.raises(UnboundedPolytopeError):
            active_cone_certificate(HPolytope([[0, 1]], [0]), [1, 0])
        with pytest.raises(EmptyPolytopeError):
            active_cone_certificate(HPolytope([[1, 0], [-1, 0]], [-1, -2]), [1, 0])


def test_emptiness_threshold():
    # violation of 1e-12 is within the feasibility tolerance
    P = HPolytope([[1, 0], [-1, 0]], [0.0, -1e-12])
    assert not linprog.is_empty(P)
    Q = HPolytope([[1, 0], [-1, 0]], [0.0, -1e-6])
    assert linprog.is_empty(Q)
