"""A graph whose edge costs change every hop.

Run with ``python demos/time_dependent.py``.  Dijkstra has no notion of time,
so the exhaustive oracle is the reference here.
"""

from tnopt import Graph, Mode, PathProblem, brute_force_path, solve_path

# Rush hour on the direct road: cheap early, expensive later.
snapshots = [
    Graph(4, [(0, 1, 5.0), (0, 3, 2.0), (1, 3, 1.0), (3, 2, 1.0)], directed=False),
    Graph(4, [(0, 1, 5.0), (0, 3, 9.0), (1, 3, 1.0), (3, 2, 9.0)], directed=False),
    Graph(4, [(0, 1, 5.0), (0, 3, 9.0), (1, 3, 1.0), (3, 2, 1.0)], directed=False),
]
pb = PathProblem(snapshots, origin=0, destination=2, steps=4, tau=20.0)
sol = solve_path(pb, Mode.LOG)
ref_cost, ref_path = brute_force_path(pb)
print(f"chain: {sol.assignment} cost {sol.objective:g}")
print(f"brute: {ref_path} cost {ref_cost:g}")
