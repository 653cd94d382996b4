import numpy as np
import pytest

from tnopt.knapsack import KnapsackInstance
from tnopt.shortest_path import Graph, PathProblem


@pytest.fixture
def small_knapsack():
    """w=[2,3], v=[3,4], c=[1,1], Q=4."""
    return KnapsackInstance.classic([2, 3], [3, 4], [1, 1], 4, tau=1.0)


@pytest.fixture
def line_graph():
    """Undirected 0-1-2 with unit costs."""
    return Graph(3, ((0, 1, 1.0), (1, 2, 1.0)), directed=False)


@pytest.fixture
def line_problem(line_graph):
    return PathProblem(line_graph, 0, 2, 3, 5.0)


def assert_log_close(actual, expected, rtol=1e-9):
    """Compare log-amplitude vectors: -inf positions must agree, the rest in linear relative terms."""
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    np.testing.assert_array_equal(actual == -np.inf, expected == -np.inf)
    ok = expected > -np.inf
    np.testing.assert_allclose(np.expm1(actual[ok] - expected[ok]), 0.0, atol=rtol)
