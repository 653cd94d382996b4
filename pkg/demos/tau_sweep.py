"""How large must tau be before the chain matches greedy on big instances?

Run with ``python demos/tau_sweep.py``.  Values are normalized by class
count, so the per-class objective scale is the same across curves.
"""

from tnopt.bench import first_match_tau, tau_sweep_knapsack

records = tau_sweep_knapsack(n=300, counts=(1, 3, 5), seed=0, stop_at_match=True)
for r in records:
    print(f"c={r.c}  tau={r.tau:<7g} relative error vs greedy {r.metric_value:+.2e}")

for c, tau in first_match_tau(records).items():
    print(f"c={c}: first tau matching greedy = {tau:g}")
