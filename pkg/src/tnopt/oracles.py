"""Reference solvers used to check the chain solvers.

None of these share numeric code with :mod:`tnopt.chain`; the brute-force
amplitude oracles enumerate assignments explicitly and accumulate the
exponentials with ``math.fsum``.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain import Solution
from .exceptions import CapExceeded, Unreachable
from .knapsack import KnapsackInstance, objective
from .shortest_path import Graph, PathProblem, path_cost

DEFAULT_CAP = 100_000


@dataclass
class ComparisonReport:
    tn_objective: float
    baseline_objective: float
    relative_error: float
    tn_time: float
    baseline_time: float
    agree: bool
    baseline: str = ""

    def to_dict(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else str(x)

        return {
            "baseline": self.baseline,
            "tn_objective": num(self.tn_objective),
            "baseline_objective": num(self.baseline_objective),
            "relative_error": num(self.relative_error),
            "tn_time": self.tn_time,
            "baseline_time": self.baseline_time,
            "agree": self.agree,
        }


def knapsack_relative_error(tn_value: float, baseline_value: float) -> float:
    """``1 - V_tn / V_baseline``: negative when the chain beats the baseline."""
    if baseline_value == 0:
        return 0.0 if tn_value == 0 else -math.inf
    return 1.0 - tn_value / baseline_value


def path_relative_error(tn_cost: float, baseline_cost: float) -> float:
    """``C_tn / C_baseline - 1``: positive when the chain walk is costlier."""
    if baseline_cost == 0:
        return 0.0 if tn_cost == 0 else math.inf
    return tn_cost / baseline_cost - 1.0


# -- knapsack -------------------------------------------------------------


def greedy_knapsack(instance: KnapsackInstance) -> Solution:
    """Fill by decreasing value/weight ratio, as many of each class as fit."""
    if not instance.is_classic:
        raise ValueError("greedy baseline needs a classic instance")
    t0 = time.perf_counter()

    def ratio(i):
        w, v = instance.classes[i].unit
        return math.inf if w == 0 else v / w

    order = sorted(range(instance.n), key=lambda i: -ratio(i))
    room = instance.capacity
    x = [0] * instance.n
    for i in order:
        w, _ = instance.classes[i].unit
        c = instance.classes[i].count
        take = c if w == 0 else min(c, room // w)
        x[i] = take
        room -= take * w
    value, _, feasible = objective(instance, x)
    return Solution(assignment=tuple(x), objective=value, feasible=feasible, elapsed=time.perf_counter() - t0)


def _final_ok(instance: KnapsackInstance) -> np.ndarray:
    q = instance.capacity
    if instance.outer is None:
        return np.ones(q + 1, dtype=bool)
    return np.array([instance.outer.evaluate(z) <= q for z in range(q + 1)])


def dp_knapsack(instance: KnapsackInstance) -> tuple[float, tuple[int, ...]]:
    """Exact optimum by dynamic programming over accumulated weight.

    Handles classic, tabulated and outer-constrained instances alike.  The
    returned value is recomputed from the reconstructed assignment.
    """
    q = instance.capacity
    best = np.full(q + 1, -np.inf)
    best[0] = 0.0
    maxc = max(c.count for c in instance.classes)
    dtype = np.int8 if maxc < 127 else np.int32
    choice = np.zeros((instance.n, q + 1), dtype=dtype)
    for k, cls in enumerate(instance.classes):
        new = np.full(q + 1, -np.inf)
        pick = np.zeros(q + 1, dtype=dtype)
        for y in range(cls.count + 1):
            w, v = cls.weights[y], cls.values[y]
            if w > q:
                continue
            cand = np.full(q + 1, -np.inf)
            cand[w:] = best[: q + 1 - w] + v
            better = cand > new
            new[better] = cand[better]
            pick[better] = y
        best = new
        choice[k] = pick
    best[~_final_ok(instance)] = -np.inf
    state = int(np.argmax(best))
    if best[state] == -np.inf:
        raise ValueError("instance has no feasible assignment")
    x = [0] * instance.n
    for k in range(instance.n - 1, -1, -1):
        y = int(choice[k, state])
        x[k] = y
        state -= instance.classes[k].weights[y]
    value, _, feasible = objective(instance, x)
    assert feasible
    return value, tuple(x)


def dp_top_values(instance: KnapsackInstance, k: int = 2) -> np.ndarray:
    """The ``k`` largest objective values over distinct feasible assignments."""
    q = instance.capacity
    top = np.full((q + 1, k), -np.inf)
    top[0, 0] = 0.0
    for cls in instance.classes:
        cands = []
        for y in range(cls.count + 1):
            w, v = cls.weights[y], cls.values[y]
            cand = np.full((q + 1, k), -np.inf)
            if w <= q:
                cand[w:] = top[: q + 1 - w] + v
            cands.append(cand)
        allc = np.concatenate(cands, axis=1)
        top = -np.sort(-allc, axis=1)[:, :k]
    top[~_final_ok(instance)] = -np.inf
    flat = np.sort(top.ravel())[::-1]
    return flat[:k]


def _logsumexp(exps: Sequence[float]) -> float:
    if len(exps) == 0:
        return -math.inf
    m = max(exps)
    return m + math.log(math.fsum(math.exp(e - m) for e in exps))


def _knapsack_amplitudes(instance, m, prefix, tau, cap):
    domains = [range(c.count + 1) for c in instance.classes[m:]]
    count = math.prod(len(d) for d in domains)
    if count > cap:
        raise CapExceeded(f"{count} completions exceed the cap of {cap}")
    prefix = tuple(int(x) for x in prefix)
    buckets = [[] for _ in range(instance.classes[m].count + 1)]
    for tail in itertools.product(*domains):
        value, _, feasible = objective(instance, prefix + tail)
        if feasible:
            buckets[tail[0]].append(tau * value)
    return np.array([_logsumexp(b) for b in buckets])


def _path_amplitudes(problem, m, prefix, tau, cap):
    # Engine variable m is vertex v_{m+1}; prefix fixes v_1..v_m.
    free = problem.steps - 2 - len(prefix)
    count = problem.V**free
    if count > cap:
        raise CapExceeded(f"{count} walks exceed the cap of {cap}")
    head = (problem.origin, *(int(v) for v in prefix))
    buckets = [[] for _ in range(problem.V)]
    for rest in itertools.product(range(problem.V), repeat=free):
        cost, feasible = path_cost(problem, head + rest + (problem.destination,))
        if feasible:
            buckets[rest[0]].append(-tau * cost)
    return np.array([_logsumexp(b) for b in buckets])


def brute_force_amplitudes(instance, m: int, prefix: Sequence[int] = (), tau: float | None = None, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Log amplitudes of the projected vector for variable ``m`` by enumeration.

    Entry ``x`` is ``log sum exp(±tau * objective)`` over every feasible full
    assignment extending ``prefix`` with variable ``m = x`` (``-inf`` when
    there is none).  For path problems variable ``m`` is vertex ``v_{m+1}``.
    """
    if len(prefix) != m:
        raise ValueError(f"prefix must fix exactly {m} variables")
    tau = instance.tau if tau is None else float(tau)
    if isinstance(instance, KnapsackInstance):
        return _knapsack_amplitudes(instance, m, prefix, tau, cap)
    if isinstance(instance, PathProblem):
        return _path_amplitudes(instance, m, prefix, tau, cap)
    raise TypeError(f"unsupported instance type {type(instance).__name__}")


# -- shortest path --------------------------------------------------------


def dijkstra(graph: Graph, origin: int, destination: int) -> tuple[float, tuple[int, ...]]:
    """Binary-heap Dijkstra; ties are resolved by the smaller vertex index."""
    adj = graph.adjacency()
    dist = {origin: 0.0}
    prev: dict[int, int] = {}
    done = set()
    heap = [(0.0, origin)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == destination:
            path = [u]
            while path[-1] != origin:
                path.append(prev[path[-1]])
            return d, tuple(reversed(path))
        for v, c in adj[u]:
            nd = d + c
            if v not in done and nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    raise Unreachable(f"vertex {destination} is unreachable from {origin}")


def brute_force_path(problem: PathProblem, cap: int = 1_000_000) -> tuple[float, tuple[int, ...]]:
    """Cheapest walk by enumerating every choice of ``v_1 .. v_{n-2}``."""
    free = problem.steps - 2
    if problem.V**free > cap:
        raise CapExceeded(f"{problem.V ** free} walks exceed the cap of {cap}")
    best, best_path = math.inf, None
    for mid in itertools.product(range(problem.V), repeat=free):
        path = (problem.origin, *mid, problem.destination)
        cost, ok = path_cost(problem, path)
        if ok and cost < best:
            best, best_path = cost, path
    if best_path is None:
        raise Unreachable(f"no {problem.steps}-step walk from {problem.origin} to {problem.destination}")
    return best, best_path
