"""Bounded knapsack by chain decimation, step by step.

Run with ``python demos/knapsack_walkthrough.py``.  A three-class instance is
small enough to print every projected amplitude vector, so the reader can see
the argmax pick each count and the margin it wins by.
"""

import numpy as np

from tnopt import KnapsackInstance, Mode, dp_knapsack, greedy_knapsack, solve_knapsack

inst = KnapsackInstance.classic(weights=[3, 4, 5], values=[4.0, 5.0, 7.0], counts=[2, 2, 1], capacity=10, tau=5.0)
print(f"{inst.n} classes, capacity {inst.capacity}, {inst.assignment_count()} assignments, tau={inst.tau}")

sol = solve_knapsack(inst, Mode.LOG, record_psi=True)
for m, (psi, margin) in enumerate(zip(sol.psi, sol.margins)):
    shown = np.array2string(psi, precision=2, suppress_small=True)
    print(f"class {m}: log psi = {shown}  -> pick {sol.assignment[m]} (margin {margin:.2f})")

best, arg = dp_knapsack(inst)
greedy = greedy_knapsack(inst)
print(f"chain  {sol.assignment}  value {sol.objective:g}")
print(f"dp     {arg}  value {best:g}")
print(f"greedy {greedy.assignment}  value {greedy.objective:g}")

# Low tau smears amplitude over near-optimal fillings; the pick can drift.
for tau in (0.0, 0.3, 1.0, 5.0):
    s = solve_knapsack(inst, tau=tau)
    print(f"tau={tau:<4} -> {s.assignment} value {s.objective:g}")
