"""Fixed-length walks on a random graph, against Dijkstra.

Run with ``python demos/shortest_path.py``.  Self-loops are free, so a walk of
``n`` vertices can idle at the destination; when ``n`` covers the Dijkstra
hop count the chain recovers the shortest-path cost.
"""

from tnopt import Mode, NoFeasible, PathProblem, dijkstra, solve_path
from tnopt.generators import random_graph

g = random_graph(12, p=0.25, seed=4)
best, route = dijkstra(g, 0, 11)
print(f"dijkstra: cost {best:.3f} via {route} ({len(route) - 1} hops)")

for steps in range(2, 12):
    pb = PathProblem(g, 0, 11, steps, tau=50.0)
    try:
        sol = solve_path(pb, Mode.LOG)
    except NoFeasible:
        print(f"n={steps:<2} no walk of this length reaches the destination")
        continue
    status = f"cost {sol.objective:.3f}" if sol.feasible else "no such walk"
    print(f"n={steps:<2} {status:<14} {sol.assignment}")
