import numpy as np
import pytest

from depthsets.geom import HPolytope, PointCloud

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def square_cloud():
    return PointCloud(np.array([[1.0, 1.0], [-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]]))


@pytest.fixture
def unit_square():
    return HPolytope.box([0.0, 0.0], [1.0, 1.0])


@pytest.fixture
def sym_square():
    return HPolytope.box([-1.0, -1.0], [1.0, 1.0])


@pytest.fixture
def triangle():
    # conv{(0,0), (1,0), (0,1)}
    return HPolytope([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
