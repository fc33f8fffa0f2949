import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depthsets import linprog
from depthsets.depth import (Emptiness, atom_levelset_check, depth_exact_2d, depth_upper_bound,
                             levelset_exact_2d, levelset_sampled, representations_agree, truncate)
from depthsets.errors import InvalidArgument
from depthsets.geom import HPolytope, canonical_directions, deterministic_net, polytope_contains

from oracles import brute_depth_2d

AXES = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])

# atom at the origin with weight 6/10; the background lies in x > 1, so
# the origin is outside its hull and the atom depth is exactly 6/10
ATOM_CLOUD = np.array([[0.0, 0.0]] * 6 + [[2.0, 1.0], [3.0, -1.0], [2.5, 2.0], [4.0, 0.5]])


def grid(lo, hi, k):
    t = np.linspace(lo, hi, k)
    X, Y = np.meshgrid(t, t)
    return np.column_stack([X.ravel(), Y.ravel()])


class TestExactDepth:
    def test_single_point(self):
        assert depth_exact_2d([[1.0, 1.0]], [1, 1]) == (1, 1)

    @pytest.mark.parametrize("x,expected", [((0, 0), (2, 4)), ((1, 1), (1, 4)), ((5, 5), (0, 4))])
    def test_square(self, square_cloud, x, expected):
        assert tuple(depth_exact_2d(square_cloud, x)) == expected

    def test_string(self, square_cloud):
        assert str(depth_exact_2d(square_cloud, [0, 0])) == "2/4"

    def test_d3_rejected(self):
        with pytest.raises(InvalidArgument):
            depth_exact_2d(np.zeros((3, 3)), [0, 0, 0])

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10**9))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 25))
        X = rng.integers(-3, 4, size=(n, 2))
        x = X[rng.integers(n)] if rng.random() < 0.3 else rng.integers(-3, 4, size=2)
        assert depth_exact_2d(X.astype(float), x.astype(float)).fraction == brute_depth_2d(X, x)

    def test_collinear(self):
        X = np.array([[float(i), 0.0] for i in range(5)])
        assert depth_exact_2d(X, [2, 0]).fraction == Fraction(3, 5)
        assert depth_exact_2d(X, [2, 1]).count == 0


class TestUpperBound:
    def test_fine_net_square(self, square_cloud):
        assert tuple(depth_upper_bound(square_cloud, [0, 0], deterministic_net(2, 0.001))) == (2, 4)

    def test_single_direction(self):
        X = np.random.default_rng(0).normal(size=(20, 2))
        val = depth_upper_bound(X, [0.1, 5.0], [[1.0, 0.0]])
        assert val.count == int(np.sum(X[:, 0] <= 0.1))

    def test_empty_net(self, square_cloud):
        with pytest.raises(InvalidArgument):
            depth_upper_bound(square_cloud, [0, 0], np.zeros((0, 2)))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**6))
    def test_dominates_exact(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(int(rng.integers(1, 30)), 2))
        x = rng.normal(size=2)
        net = rng.normal(size=(int(rng.integers(1, 50)), 2))
        assert depth_upper_bound(X, x, net).count >= depth_exact_2d(X, x).count

    def test_d3(self):
        X = np.vstack([np.eye(3), -np.eye(3)])
        assert depth_upper_bound(X, np.zeros(3), deterministic_net(3, 0.1)).count >= 1


class TestSampled:
    def test_box(self, square_cloud):
        res = levelset_sampled(square_cloud, 0.25, AXES)
        assert res.emptiness is Emptiness.NONEMPTY and res.directions_used == 4
        assert np.allclose(res.polytope.offsets, 1.0)

    def test_unbounded(self, square_cloud):
        res = levelset_sampled(square_cloud, 0.25, [[1.0, 0.0]] * 5)
        assert res.emptiness is Emptiness.UNBOUNDED

    def test_empty(self, square_cloud):
        res = levelset_sampled(square_cloud, 0.9, deterministic_net(2, 0.05))
        assert res.emptiness is Emptiness.EMPTY
        assert linprog.is_empty(res.polytope)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.05, 0.45), st.floats(0.05, 0.45))
    def test_nesting_in_alpha(self, seed, a1, a2):
        a1, a2 = min(a1, a2), max(a1, a2)
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(25, 2))
        U = rng.normal(size=(40, 2))
        r1, r2 = levelset_sampled(X, a1, U), levelset_sampled(X, a2, U)
        assert np.all(r2.polytope.offsets <= r1.polytope.offsets + 1e-9)
        if r1.emptiness is Emptiness.NONEMPTY and r2.emptiness is Emptiness.NONEMPTY:
            probe = deterministic_net(2, 0.2).points
            h1 = linprog.support_values(r1.polytope, probe)
            h2 = linprog.support_values(r2.polytope, probe)
            assert np.all(h2 <= h1 + 1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_fewer_directions_superset(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(30, 2))
        U = rng.normal(size=(60, 2))
        full = levelset_sampled(X, 0.2, U)
        sub = levelset_sampled(X, 0.2, U[:30])
        if full.emptiness is Emptiness.NONEMPTY and sub.emptiness is Emptiness.NONEMPTY:
            probe = deterministic_net(2, 0.2).points
            assert np.all(linprog.support_values(full.polytope, probe)
                          <= linprog.support_values(sub.polytope, probe) + 1e-9)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_contains_deep_points(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.integers(-5, 6, size=(15, 2)).astype(float)
        U = rng.normal(size=(int(rng.integers(3, 30)), 2))
        alpha = 0.3
        P = levelset_sampled(X, alpha, U).polytope
        for g in grid(-5, 5, 21):
            if depth_exact_2d(X, g).at_least(alpha):
                assert polytope_contains(P, g, 1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_translation(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.integers(-5, 6, size=(12, 2)).astype(float)
        v = rng.integers(-5, 6, size=2).astype(float)
        U = AXES
        a = levelset_sampled(X, 0.25, U).polytope.offsets
        b = levelset_sampled(X + v, 0.25, U).polytope.offsets
        assert np.array_equal(b, a + U @ v)


class TestExactLevelSet:
    def test_square_box(self, square_cloud):
        res = levelset_exact_2d(square_cloud, 0.25)
        U = deterministic_net(2, 0.01).points
        box = HPolytope.box([-1, -1], [1, 1])
        gap = np.abs(linprog.support_values(res.polytope, U) - linprog.support_values(box, U))
        assert gap.max() <= 1e-9

    def test_square_grid_membership(self, square_cloud):
        res = levelset_exact_2d(square_cloud, 0.25)
        G = grid(-2, 2, 200)
        slack = res.polytope.slack(G)
        inside = np.array([depth_exact_2d(square_cloud, g).at_least(0.25) for g in G])
        off = np.abs(slack) > 1e-9
        assert np.array_equal((slack >= 0)[off], inside[off])

    def test_three_points_triangle(self):
        X = np.array([[0.0, 0.0], [3.0, 0.5], [1.0, 2.0]])
        res = levelset_exact_2d(X, 1 / 3)
        U = deterministic_net(2, 0.05).points
        assert np.allclose(linprog.support_values(res.polytope, U), np.max(U @ X.T, axis=1), atol=1e-9)

    def test_single_point(self):
        p = np.array([[0.3, -0.7]])
        res = levelset_exact_2d(p, 0.5)
        U = deterministic_net(2, 0.1).points
        assert np.allclose(linprog.support_values(res.polytope, U), U @ p[0], atol=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_donoho_gasko_nonempty(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(int(rng.integers(1, 20)), 2))
        assert levelset_exact_2d(X, 1 / 3).emptiness is Emptiness.NONEMPTY

    def test_d3_rejected(self):
        with pytest.raises(InvalidArgument):
            levelset_exact_2d(np.zeros((2, 3)), 0.3)


class TestAgreement:
    def test_square(self, square_cloud):
        rep = representations_agree(square_cloud, 0.25, grid(-2, 2, 40), tol=1e-3)
        assert rep.disagreements == 0 and rep.points == 1600

    def test_empty_grid(self, square_cloud):
        assert representations_agree(square_cloud, 0.25, np.zeros((0, 2))).disagreements == 0

    def test_far_points(self, square_cloud):
        rep = representations_agree(square_cloud, 0.25, grid(50, 60, 5))
        assert rep.disagreements == 0 and rep.inside_by_depth == 0 and rep.inside_by_quantile == 0


class TestAtom:
    def test_singleton(self):
        chk = atom_levelset_check(ATOM_CLOUD, 0.55)
        assert chk.holds and tuple(chk.atom_depth) == (6, 10)
        assert np.array_equal(chk.atom, [0.0, 0.0])

    def test_above_weight_empty(self):
        chk = atom_levelset_check(ATOM_CLOUD, 0.61)
        assert not chk.holds and chk.emptiness is Emptiness.EMPTY

    def test_point_mass(self):
        assert atom_levelset_check(np.tile([1.5, -2.0], (7, 1)), 0.9)

    def test_preconditions(self):
        with pytest.raises(InvalidArgument):
            atom_levelset_check(ATOM_CLOUD, 0.5)
        with pytest.raises(InvalidArgument):
            atom_levelset_check(np.random.default_rng(0).normal(size=(10, 2)), 0.6)


class TestTruncate:
    def test_strip_becomes_bounded(self):
        res = levelset_sampled([[0.0, 0.0], [1.0, 0.0]], 0.5, [[0, 1.0], [0, -1.0]])
        assert res.emptiness is Emptiness.UNBOUNDED
        t = truncate(res, 10.0)
        assert t.emptiness is Emptiness.NONEMPTY and t.truncation == 10.0

    def test_empty_becomes_origin(self, square_cloud):
        res = levelset_sampled(square_cloud, 0.9, deterministic_net(2, 0.05))
        t = truncate(res, math.log(4))
        assert t.emptiness is Emptiness.NONEMPTY
        U = deterministic_net(2, 0.1).points
        assert np.allclose(linprog.support_values(t.polytope, U), 0, atol=1e-12)

    def test_noop_when_inside(self, square_cloud):
        res = levelset_sampled(square_cloud, 0.25, AXES)
        t = truncate(res, 10.0)
        C = canonical_directions(2)
        assert np.allclose(linprog.support_values(t.polytope, C),
                           linprog.support_values(res.polytope, C), atol=1e-9)

    def test_radius_validated(self, square_cloud):
        with pytest.raises(InvalidArgument):
            truncate(levelset_sampled(square_cloud, 0.25, AXES), 0.0)

    def test_d3(self):
        res = levelset_sampled(np.eye(3), 0.3, [[0, 0, 1.0]])
        t = truncate(res, 2.0)
        assert t.emptiness is Emptiness.NONEMPTY
