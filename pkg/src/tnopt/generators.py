"""Seeded random instances for tests, demos and benchmarks."""

from __future__ import annotations

import math

import numpy as np

from .knapsack import ItemClass, KnapsackInstance, OuterConstraint
from .shortest_path import Graph, PathProblem


def _counts(rng, n, c):
    if isinstance(c, (tuple, list)):
        lo, hi = c
        return rng.integers(lo, hi + 1, size=n)
    return np.full(n, int(c))


def random_knapsack(
    n: int,
    c=1,
    w_max: int = 10,
    capacity_ratio: float = 0.8,
    capacity: int | None = None,
    normalize: bool = False,
    tau: float = 1.0,
    seed: int = 0,
) -> KnapsackInstance:
    """Classic instance with weights in ``[1, w_max]`` and values in ``(0, 1]``.

    ``c`` is a fixed count or an inclusive ``(lo, hi)`` range.  The capacity is
    ``floor(capacity_ratio * sum(c_i * w_i))`` unless given explicitly.  With
    ``normalize`` every value is divided by its class count.
    """
    if n < 1 or w_max < 1 or capacity_ratio < 0:
        raise ValueError("need n >= 1, w_max >= 1 and a non-negative capacity ratio")
    rng = np.random.default_rng(seed)
    counts = _counts(rng, n, c)
    weights = rng.integers(1, w_max + 1, size=n)
    values = 1.0 - rng.random(n)
    if normalize:
        values = values / counts
    if capacity is None:
        capacity = math.floor(capacity_ratio * int(np.dot(counts, weights)))
    classes = tuple(ItemClass.classic(int(w), float(v), int(k)) for w, v, k in zip(weights, values, counts))
    return KnapsackInstance(classes, int(capacity), float(tau))


def random_tabulated_knapsack(
    n: int,
    c=(1, 4),
    w_max: int = 6,
    capacity: int = 30,
    poly: tuple[int, ...] | None = None,
    tau: float = 1.0,
    seed: int = 0,
) -> KnapsackInstance:
    """Nonlinear instance: per-class weight tables non-decreasing, value tables arbitrary positive."""
    rng = np.random.default_rng(seed)
    counts = _counts(rng, n, c)
    classes = []
    for k in counts:
        steps = rng.integers(0, w_max + 1, size=int(k))
        steps[0] = max(steps[0], 1)
        weights = np.concatenate(([0], np.cumsum(steps)))
        values = np.concatenate(([0.0], 1.0 - rng.random(int(k))))
        classes.append(ItemClass.tabulated(weights.tolist(), values.tolist()))
    outer = OuterConstraint(poly=tuple(poly)) if poly is not None else None
    return KnapsackInstance(tuple(classes), int(capacity), float(tau), outer)


def random_graph(
    V: int,
    p: float = 0.2,
    cost_range: tuple[float, float] = (1.0, 10.0),
    directed: bool = True,
    integer_costs: bool = False,
    seed: int = 0,
) -> Graph:
    """Erdos-Renyi graph on top of a random Hamiltonian cycle (strongly connected).

    Edge costs are uniform on ``cost_range`` (uniform integers when
    ``integer_costs``).
    """
    if V < 1 or not 0 <= p <= 1:
        raise ValueError("need V >= 1 and 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    mask = rng.random((V, V)) < p
    np.fill_diagonal(mask, False)
    if V > 1:
        perm = rng.permutation(V)
        mask[perm, np.roll(perm, -1)] = True
    if not directed:
        mask = np.triu(mask | mask.T, k=1)
    src, dst = np.nonzero(mask)
    lo, hi = cost_range
    if integer_costs:
        costs = rng.integers(int(lo), int(hi) + 1, size=src.size).astype(float)
    else:
        costs = rng.uniform(lo, hi, size=src.size)
    edges = tuple(zip(src.tolist(), dst.tolist(), costs.tolist()))
    return Graph(V, edges, directed)


def random_path_problem(V, steps=None, p=0.2, tau=1.0, seed=0, time_dependent=False, **graph_kw) -> PathProblem:
    """Random origin/destination pair on a random graph (per-hop snapshots when ``time_dependent``)."""
    steps = V if steps is None else steps
    rng = np.random.default_rng(seed)
    o, d = (int(x) for x in rng.choice(V, size=2, replace=V < 2))
    if time_dependent:
        seeds = rng.integers(0, 2**31, size=steps - 1)
        graph = tuple(random_graph(V, p, seed=int(s), **graph_kw) for s in seeds)
    else:
        graph = random_graph(V, p, seed=int(rng.integers(0, 2**31)), **graph_kw)
    return PathProblem(graph, o, d, steps, float(tau))
