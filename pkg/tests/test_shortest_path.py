import math

import numpy as np
import pytest

from tnopt.chain import backward_sweep, psi_vector
from tnopt.exceptions import InstanceError, NoFeasible
from tnopt.generators import random_graph, random_path_problem
from tnopt.numerics import Mode
from tnopt.oracles import brute_force_amplitudes, brute_force_path, dijkstra
from tnopt.shortest_path import (
    Graph,
    PathChain,
    PathProblem,
    build_head_sp,
    build_middle_sp,
    build_terminal_sp,
    dumps_graph,
    load_graph,
    loads_graph,
    path_cost,
    problem_from_text,
    problem_to_text,
    save_graph,
    solve_path,
)

from .conftest import assert_log_close


# -- graph ----------------------------------------------------------------


@pytest.mark.parametrize(
    "edges",
    [((0, 3, 1.0),), ((0, 1, -1.0),), ((0, 1, math.inf),), ((1, 1, 2.0),), ((0, 1, 1.0), (0, 1, 2.0))],
)
def test_graph_rejects(edges):
    with pytest.raises(InstanceError):
        Graph(3, edges)


def test_undirected_duplicate_rejected():
    with pytest.raises(InstanceError):
        Graph(2, ((0, 1, 1.0), (1, 0, 1.0)), directed=False)


def test_zero_self_loop_is_implicit():
    g = Graph(2, ((0, 0, 0.0), (0, 1, 2.0)))
    assert g.edges == ((0, 1, 2.0),)
    assert g.cost(1, 1) == 0.0 and g.cost(1, 0) == math.inf


def test_neighbors_include_self(line_graph):
    nbrs, costs = line_graph.neighbors(1)
    assert nbrs.tolist() == [0, 1, 2] and costs.tolist() == [1.0, 0.0, 1.0]


def test_path_cost_examples(line_problem):
    assert path_cost(line_problem, (0, 1, 2)) == (2.0, True)
    direct = PathProblem(line_problem.graph, 0, 2, 2)
    assert path_cost(direct, (0, 2)) == (math.inf, False)
    g0 = Graph(3, ((0, 1, 1.0), (1, 2, 9.0)))
    g1 = Graph(3, ((0, 1, 9.0), (1, 2, 5.0)))
    assert path_cost(PathProblem((g0, g1), 0, 2, 3), (0, 1, 2)) == (6.0, True)


def test_problem_validation(line_graph):
    with pytest.raises(InstanceError):
        PathProblem(line_graph, 0, 2, 1)
    with pytest.raises(InstanceError):
        PathProblem(line_graph, 0, 5, 3)
    with pytest.raises(InstanceError):
        PathProblem((line_graph,), 0, 2, 4)
    with pytest.raises(InstanceError):
        PathProblem(line_graph, 0, 2, 3, tau=math.nan)


# -- builders -------------------------------------------------------------


def test_head_line_graph(line_graph):
    pb = PathProblem(line_graph, 0, 2, 4, tau=2.0)
    entries = {(i, j): e for i, j, e in build_head_sp(pb, 1, 0).entries()}
    assert entries[(0, 0)] == 0.0
    assert entries[(0, 1)] == -2.0
    assert entries[(1, 1)] == -2.0
    assert entries[(1, 2)] == -4.0
    assert all(i in (0, 1) for i, _ in entries)


def test_head_isolated_origin():
    g = Graph(3, ((1, 2, 1.0), (2, 0, 1.0)))
    pb = PathProblem(g, 0, 2, 4)
    assert {i for i, _, _ in build_head_sp(pb, 1, 0).entries()} == {0}


def test_head_time_dependent_uses_both_snapshots():
    g0 = Graph(2, ((0, 1, 1.0),))
    g1 = Graph(2, ((0, 1, 7.0),))
    pb = PathProblem((g0, g1, g1), 0, 1, 4, tau=1.0)
    entries = {(i, j): e for i, j, e in build_head_sp(pb, 1, 0).entries()}
    assert entries[(1, 1)] == -1.0  # hop 0 edge, then self-loop
    assert entries[(0, 1)] == -7.0  # stay, then hop 1 edge


def test_head_step_range(line_problem):
    with pytest.raises(ValueError):
        build_head_sp(line_problem, 2, 0)


def test_middle_complete_graph():
    g = random_graph(3, p=1.0, seed=0)
    t = build_middle_sp(PathProblem(g, 0, 1, 3, tau=1.5), 0)
    ent = t.entries()
    assert len(ent) == 9
    assert sorted(e for i, j, e in ent if i == j) == [0.0] * 3
    assert t.nnz == g.arc_count + g.V


def test_middle_time_dependent_missing_edge():
    full = Graph(2, ((0, 1, 1.0),))
    empty = Graph(2, ())
    pb = PathProblem((full, empty, full), 0, 1, 4)
    assert (0, 1) in {(i, j) for i, j, _ in build_middle_sp(pb, 0).entries()}
    assert (0, 1) not in {(i, j) for i, j, _ in build_middle_sp(pb, 1).entries()}


def test_terminal_line_graph(line_graph):
    pb = PathProblem(line_graph, 0, 2, 5, tau=1.3)
    n = build_terminal_sp(pb)
    assert n[1] == pytest.approx(2 * math.exp(-1.3))
    assert n[2] >= 1.0


def test_terminal_far_vertex_zero():
    g = Graph(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)))
    assert build_terminal_sp(PathProblem(g, 0, 3, 4))[0] == 0.0


def test_terminal_needs_three_steps(line_graph):
    with pytest.raises(ValueError):
        build_terminal_sp(PathProblem(line_graph, 0, 2, 2))


def test_last_tail_is_terminal_on_short_chain(line_graph):
    # With four free vertices the terminal vector sits at tails[1].
    pb = PathProblem(line_graph, 0, 2, 6, tau=0.7)
    cache = backward_sweep(PathChain(pb), Mode.LINEAR)
    np.testing.assert_allclose(cache.tails[1], build_terminal_sp(pb, Mode.LINEAR))


# -- solver ---------------------------------------------------------------


@pytest.mark.parametrize("mode", [Mode.LINEAR, Mode.LOG])
@pytest.mark.parametrize("cached", [True, False])
def test_line_graph_solution(line_problem, mode, cached):
    sol = solve_path(line_problem, mode, cached=cached)
    assert sol.assignment == (0, 1, 2) and sol.objective == 2.0


@pytest.mark.parametrize("steps", [2, 3, 4, 7])
def test_origin_equals_destination(steps):
    g = random_graph(5, p=0.4, seed=1)
    sol = solve_path(PathProblem(g, 3, 3, steps, tau=5.0))
    assert sol.objective == 0.0 and set(sol.assignment) == {3}


def test_two_step_walk(line_graph):
    assert solve_path(PathProblem(line_graph, 0, 1, 2)).assignment == (0, 1)
    sol = solve_path(PathProblem(line_graph, 0, 2, 2))
    assert not sol.feasible and sol.objective == math.inf


def test_too_few_steps_no_feasible():
    g = Graph(5, tuple((i, i + 1, 1.0) for i in range(4)))
    with pytest.raises(NoFeasible):
        solve_path(PathProblem(g, 0, 4, 4))


@pytest.mark.parametrize("seed", range(5))
def test_matches_dijkstra(seed):
    pb = random_path_problem(20, p=0.2, tau=300.0, seed=seed)
    assert solve_path(pb).objective == dijkstra(pb.graph, pb.origin, pb.destination)[0]


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("time_dependent", [False, True])
def test_psi_matches_oracle(seed, time_dependent):
    pb = random_path_problem(4, steps=5, p=0.5, tau=0.9, seed=seed, time_dependent=time_dependent)
    chain = PathChain(pb)
    cache = backward_sweep(chain, Mode.LINEAR)
    prefix = []
    for m in range(chain.num_variables):
        psi = psi_vector(chain, cache, m, prefix)
        with np.errstate(divide="ignore"):
            assert_log_close(np.log(psi), brute_force_amplitudes(pb, m, prefix))
        prefix.append(int(np.argmax(psi)))


@pytest.mark.parametrize("seed", range(6))
def test_static_equals_time_dependent_copy(seed):
    pb = random_path_problem(6, steps=5, p=0.4, tau=50.0, seed=seed)
    a, b = solve_path(pb), solve_path(pb.as_time_dependent())
    assert a.assignment == b.assignment and a.objective == b.objective


def test_time_dependent_matches_brute_force():
    pb = random_path_problem(5, steps=5, p=0.5, tau=200.0, seed=3, time_dependent=True)
    assert solve_path(pb).objective == brute_force_path(pb)[0]


def test_with_steps(line_problem):
    assert line_problem.with_steps(5).steps == 5
    with pytest.raises(ValueError):
        line_problem.as_time_dependent().with_steps(5)


# -- file format ----------------------------------------------------------


def test_round_trip_static(tmp_path, line_graph):
    text = dumps_graph(line_graph)
    g, meta = loads_graph(text)
    assert g == line_graph and meta == {}
    save_graph(line_graph, tmp_path / "g.txt", {"origin": 0})
    g2, meta2 = load_graph(tmp_path / "g.txt")
    assert g2 == line_graph and meta2 == {"origin": 0}


def test_round_trip_problem():
    pb = random_path_problem(5, steps=4, tau=2.5, seed=9, time_dependent=True)
    back = problem_from_text(problem_to_text(pb))
    assert back == pb


def test_problem_overrides_and_comments():
    text = "# demo\nV 3 undirected\norigin 0\ndestination 2\n\n0 1 1\n1 2 1.5\n"
    pb = problem_from_text(text, steps=4, tau=3.0)
    assert (pb.origin, pb.destination, pb.steps, pb.tau) == (0, 2, 4, 3.0)
    assert pb.graph.cost(2, 1) == 1.5


def test_missing_parameter_reported():
    with pytest.raises(InstanceError, match="steps"):
        problem_from_text("V 2 directed\norigin 0\ndestination 1\n0 1 1\n")


@pytest.mark.parametrize(
    "text, line",
    [
        ("V 2 sideways\n", 1),
        ("V 2 directed\n0 1\n", 2),
        ("V 2 directed\n0 1 1\norigin 0\n", 3),
        ("V 2 directed\n--- step 1\n", 2),
        ("V 2 directed\n\n0 x 1\n", 3),
        ("V 2 directed\nsteps many\n", 2),
    ],
)
def test_parse_errors_have_lines(text, line):
    with pytest.raises(InstanceError) as exc:
        loads_graph(text)
    assert exc.value.line == line
