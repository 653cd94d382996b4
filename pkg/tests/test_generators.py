import math

import numpy as np
import pytest

from tnopt.generators import random_graph, random_knapsack, random_path_problem, random_tabulated_knapsack
from tnopt.knapsack import dumps
from tnopt.oracles import dijkstra
from tnopt.shortest_path import dumps_graph


def test_knapsack_deterministic():
    assert dumps(random_knapsack(20, (1, 5), seed=3)) == dumps(random_knapsack(20, (1, 5), seed=3))
    assert dumps(random_knapsack(20, seed=3)) != dumps(random_knapsack(20, seed=4))


def test_knapsack_ranges_and_capacity():
    inst = random_knapsack(200, (1, 5), w_max=7, capacity_ratio=0.8, seed=1)
    ws = [c.unit[0] for c in inst.classes]
    vs = [c.unit[1] for c in inst.classes]
    assert min(ws) >= 1 and max(ws) <= 7
    assert min(vs) > 0 and max(vs) <= 1
    assert inst.capacity == math.floor(0.8 * sum(c.count * c.unit[0] for c in inst.classes))


def test_knapsack_normalize_divides_by_count():
    raw = random_knapsack(10, 4, seed=2)
    norm = random_knapsack(10, 4, normalize=True, seed=2)
    np.testing.assert_allclose([c.unit[1] * 4 for c in norm.classes], [c.unit[1] for c in raw.classes])


def test_knapsack_invalid():
    with pytest.raises(ValueError):
        random_knapsack(0)


def test_tabulated_tables_monotone():
    inst = random_tabulated_knapsack(10, seed=5)
    for cls in inst.classes:
        assert np.all(np.diff(cls.w_table) >= 0)
        assert cls.weights[0] == 0 and cls.values[0] == 0.0


def test_graph_complete():
    g = random_graph(5, p=1.0, seed=0)
    assert g.arc_count == 20


def test_graph_strongly_connected():
    g = random_graph(30, p=0.0, seed=4)
    for d in range(1, 30):
        dijkstra(g, 0, d)


def test_graph_integer_costs_and_determinism():
    g = random_graph(12, p=0.3, cost_range=(1, 5), integer_costs=True, seed=8)
    assert all(float(c).is_integer() and 1 <= c <= 5 for _, _, c in g.edges)
    assert dumps_graph(g) == dumps_graph(random_graph(12, p=0.3, cost_range=(1, 5), integer_costs=True, seed=8))


def test_undirected_graph():
    g = random_graph(6, p=0.5, directed=False, seed=1)
    for i, j, c in g.edges:
        assert g.cost(j, i) == c


def test_path_problem_snapshots():
    pb = random_path_problem(6, steps=4, seed=2, time_dependent=True)
    assert pb.time_dependent and len(pb.graph) == 3
    assert random_path_problem(6, seed=2).steps == 6
