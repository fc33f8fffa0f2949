import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depthsets import linprog
from depthsets.errors import InvalidArgument
from depthsets.geom import HPolytope, deterministic_net
from depthsets.metric import (discretized_deviation_bound, hausdorff_support,
                              quantile_deviation_to_hausdorff)

from oracles import hausdorff_2d, random_polygon, vertices_2d


def in_certified_range(est, true):
    return est.value - 1e-9 <= true <= est.upper + 1e-9


class TestHausdorff:
    def test_identity(self, unit_square):
        est = hausdorff_support(unit_square, unit_square, deterministic_net(2, 0.1))
        assert est.value == 0 and est.certified_error >= 0

    def test_nested_squares(self):
        P = HPolytope.box([0, 0], [1, 1])
        Q = HPolytope.box([0, 0], [2, 2])
        est = hausdorff_support(P, Q, deterministic_net(2, 0.001))
        assert in_certified_range(est, math.sqrt(2))
        assert abs(est.value - math.sqrt(2)) <= est.certified_error

    def test_translation(self, unit_square):
        est = hausdorff_support(unit_square, unit_square.translate([3, 0]), deterministic_net(2, 0.01))
        assert in_certified_range(est, 3.0)

    def test_symmetric(self):
        rng = np.random.default_rng(1)
        P, Q = HPolytope(*random_polygon(rng)), HPolytope(*random_polygon(rng))
        net = deterministic_net(2, 0.05)
        assert hausdorff_support(P, Q, net) == hausdorff_support(Q, P, net)

    def test_vertex_oracle(self):
        rng = np.random.default_rng(7)
        net = deterministic_net(2, 0.05)
        for _ in range(10):
            P, Q = HPolytope(*random_polygon(rng)), HPolytope(*random_polygon(rng))
            true = hausdorff_2d(vertices_2d(P.normals, P.offsets), vertices_2d(Q.normals, Q.offsets))
            assert in_certified_range(hausdorff_support(P, Q, net), true)

    def test_empty_input(self, unit_square):
        E = HPolytope([[1, 0], [-1, 0]], [-1, -2])
        with pytest.raises(InvalidArgument, match="empty"):
            hausdorff_support(E, unit_square, deterministic_net(2, 0.1))

    def test_unbounded_input(self, unit_square):
        U = HPolytope([[1, 0]], [1])
        with pytest.raises(InvalidArgument, match="unbounded"):
            hausdorff_support(unit_square, U, deterministic_net(2, 0.1))

    def test_d3_boxes(self):
        P = HPolytope.box([0, 0, 0], [1, 1, 1])
        Q = HPolytope.box([0, 0, 0], [1, 1, 2])
        est = hausdorff_support(P, Q, deterministic_net(3, 0.1))
        assert in_certified_range(est, 1.0)

    def test_sandwich_with_deviation_lemma(self):
        # polygon from the profile of the unit disk, offsets perturbed by <= eta
        rng = np.random.default_rng(5)
        U = deterministic_net(2, 0.02).points
        eta, r, R = 0.05, 1.0, 1.0
        P = HPolytope(U, np.ones(len(U)))
        Q = HPolytope(U, 1 + rng.uniform(-eta, eta, len(U)))
        est = hausdorff_support(P, Q, deterministic_net(2, 0.01))
        # both sets are within the net slack of the smooth sets the lemma compares
        slack = 2 * 1.1 * 0.02 / (1 - 0.02)
        assert est.value <= quantile_deviation_to_hausdorff(eta, r, R) + slack


class TestDeviationFormulas:
    def test_zero(self):
        assert quantile_deviation_to_hausdorff(0.0, 1.0, 1.0) == 0

    def test_values(self):
        assert quantile_deviation_to_hausdorff(0.1, 1, 1) == pytest.approx(0.1 * 1.1 / 0.9, rel=1e-12)
        assert quantile_deviation_to_hausdorff(0.1, 1, 2) == pytest.approx(0.2 * 1.1 / 0.9, rel=1e-12)
        assert discretized_deviation_bound(0.1, 1, 1, 0.1) == pytest.approx(
            0.1 * 1.1 / 0.9 + 0.2 / 0.9, rel=1e-12)

    def test_vanishing_slack(self):
        assert discretized_deviation_bound(0.0, 1, 1, 1e-6) == pytest.approx(2e-6 / (1 - 1e-6), rel=1e-12)

    @pytest.mark.parametrize("eta,r,R", [(1.0, 1.0, 1.0), (-0.1, 1, 1), (0.1, 2, 1)])
    def test_rejects(self, eta, r, R):
        with pytest.raises(InvalidArgument):
            quantile_deviation_to_hausdorff(eta, r, R)

    @pytest.mark.parametrize("delta", [0.0, 1.0])
    def test_rejects_delta(self, delta):
        with pytest.raises(InvalidArgument):
            discretized_deviation_bound(0.1, 1, 1, delta)

    @settings(max_examples=100)
    @given(st.floats(0, 0.9), st.floats(1, 3), st.floats(0.01, 0.9), st.floats(0.001, 0.05))
    def test_monotone(self, eta, R, delta, step):
        r = 1.0
        base = discretized_deviation_bound(eta, r, R, delta)
        assert discretized_deviation_bound(eta + step, r, R, delta) >= base
        assert discretized_deviation_bound(eta, r, R + step, delta) >= base
        assert discretized_deviation_bound(eta, r, R, delta + step) >= base
