"""Benchmark harness: tau sweeps and scaling timings as flat CSV records.

Each experiment returns a list of :class:`BenchRecord`; every record carries
the generator seed and the parameters needed to regenerate its instance.
Timings are the median of ``repetitions`` runs on a monotone clock.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence, TextIO

from .exceptions import NoFeasible
from .generators import random_graph, random_knapsack
from .knapsack import solve_knapsack
from .numerics import Mode
from .oracles import dijkstra, greedy_knapsack, knapsack_relative_error, path_relative_error
from .shortest_path import PathProblem, solve_path

CSV_COLUMNS = ("experiment", "seed", "n", "Q", "c", "V", "steps", "tau", "mode", "cached", "metric_name", "metric_value", "repetitions")

EXPERIMENTS = ("TauSweepKnapsack", "TauSweepPath", "TimeVsQ", "TimeVsN", "TimeVsSteps", "CachedVsUncached")

DEFAULT_TAUS = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0, 10000.0)


@dataclass
class BenchRecord:
    experiment: str
    seed: int
    metric_name: str
    metric_value: float
    n: int | None = None
    Q: int | None = None
    c: str | None = None
    V: int | None = None
    steps: int | None = None
    tau: float | None = None
    mode: str = "log"
    cached: bool = True
    repetitions: int = 1

    def row(self) -> dict:
        d = asdict(self)
        return {k: ("" if d[k] is None else d[k]) for k in CSV_COLUMNS}


def median_time(fn: Callable[[], object], repetitions: int = 5) -> float:
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _c_label(c) -> str:
    return f"{c[0]}:{c[1]}" if isinstance(c, (tuple, list)) else str(c)


def tau_sweep_knapsack(
    n: int = 1000,
    counts: Sequence = (1, 3, 5),
    taus: Sequence[float] = DEFAULT_TAUS,
    seed: int = 0,
    mode: Mode | str = Mode.LOG,
    capacity_ratio: float = 0.8,
    w_max: int = 10,
    stop_at_match: bool = False,
) -> list[BenchRecord]:
    """Relative error against greedy as tau grows, one curve per class count.

    Values are normalized by the class count.  With ``stop_at_match`` a curve
    ends at the first tau where the chain matches or beats greedy.
    """
    mode = Mode.parse(mode)
    out = []
    for c in counts:
        inst = random_knapsack(n, c, w_max=w_max, capacity_ratio=capacity_ratio, normalize=True, seed=seed)
        base = greedy_knapsack(inst).objective
        for tau in taus:
            try:
                eps = knapsack_relative_error(solve_knapsack(inst, mode, tau=tau).objective, base)
            except NoFeasible:
                eps = math.inf
            out.append(
                BenchRecord("TauSweepKnapsack", seed, "relative_error", eps, n=n, Q=inst.capacity, c=_c_label(c), tau=float(tau), mode=mode.value)
            )
            if stop_at_match and eps <= 0:
                break
    return out


def first_match_tau(records: Iterable[BenchRecord]) -> dict[str, float]:
    """Smallest tau per class-count curve with ``relative_error <= 0`` (inf if never)."""
    best: dict[str, float] = {}
    for r in records:
        best.setdefault(r.c, math.inf)
        if r.metric_value <= 0:
            best[r.c] = min(best[r.c], r.tau)
    return best


def tau_sweep_path(
    sizes: Sequence[int] = (10, 20, 40),
    taus: Sequence[float] = (0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0),
    p: float = 0.2,
    seed: int = 0,
    mode: Mode | str = Mode.LOG,
) -> list[BenchRecord]:
    """Relative cost error against Dijkstra on ``V``-vertex graphs with ``n = V`` steps."""
    mode = Mode.parse(mode)
    out = []
    for V in sizes:
        g = random_graph(V, p, seed=seed)
        o, d = 0, V - 1
        base, _ = dijkstra(g, o, d)
        for tau in taus:
            pb = PathProblem(g, o, d, V, float(tau))
            try:
                eps = path_relative_error(solve_path(pb, mode).objective, base)
            except NoFeasible:
                eps = math.inf
            out.append(BenchRecord("TauSweepPath", seed, "relative_error", eps, V=V, steps=V, tau=float(tau), mode=mode.value))
    return out


def time_vs_q(
    n: int = 2000,
    capacities: Sequence[int] = (2500, 5000, 10000, 20000),
    c=1,
    tau: float = 1.0,
    seed: int = 0,
    repetitions: int = 5,
    mode: Mode | str = Mode.LOG,
    cached: bool = True,
) -> list[BenchRecord]:
    mode = Mode.parse(mode)
    out = []
    for q in capacities:
        inst = random_knapsack(n, c, capacity=q, tau=tau, seed=seed)
        t = median_time(lambda: solve_knapsack(inst, mode, cached=cached), repetitions)
        out.append(
            BenchRecord("TimeVsQ", seed, "elapsed_seconds", t, n=n, Q=q, c=_c_label(c), tau=tau, mode=mode.value, cached=cached, repetitions=repetitions)
        )
    return out


def time_vs_n(
    sizes: Sequence[int] = (500, 1000, 2000, 4000),
    capacity: int = 5000,
    c=1,
    tau: float = 1.0,
    seed: int = 0,
    repetitions: int = 5,
    mode: Mode | str = Mode.LOG,
    cached: bool = True,
    experiment: str = "TimeVsN",
) -> list[BenchRecord]:
    mode = Mode.parse(mode)
    out = []
    for n in sizes:
        inst = random_knapsack(n, c, capacity=capacity, tau=tau, seed=seed)
        t = median_time(lambda: solve_knapsack(inst, mode, cached=cached), repetitions)
        out.append(
            BenchRecord(experiment, seed, "elapsed_seconds", t, n=n, Q=capacity, c=_c_label(c), tau=tau, mode=mode.value, cached=cached, repetitions=repetitions)
        )
    return out


def time_vs_steps(
    V: int = 2000,
    steps: Sequence[int] = (25, 50, 100, 200),
    p: float = 0.005,
    tau: float = 300.0,
    seed: int = 0,
    repetitions: int = 5,
    mode: Mode | str = Mode.LOG,
    cached: bool = True,
) -> list[BenchRecord]:
    """Path solve time on one fixed random graph as the step count grows."""
    mode = Mode.parse(mode)
    g = random_graph(V, p, seed=seed)
    out = []
    for n in steps:
        pb = PathProblem(g, 0, V - 1, n, tau)
        t = median_time(lambda: solve_path(pb, mode, cached=cached), repetitions)
        out.append(
            BenchRecord("TimeVsSteps", seed, "elapsed_seconds", t, V=V, steps=n, tau=tau, mode=mode.value, cached=cached, repetitions=repetitions)
        )
    return out


def cached_vs_uncached(
    sizes: Sequence[int] = (50, 100, 200),
    capacity: int = 1500,
    c=1,
    tau: float = 1.0,
    seed: int = 0,
    repetitions: int = 3,
    mode: Mode | str = Mode.LOG,
) -> list[BenchRecord]:
    out = []
    for cached in (True, False):
        out += time_vs_n(sizes, capacity, c, tau, seed, repetitions, mode, cached, experiment="CachedVsUncached")
    return out


def doubling_ratios(records: Sequence[BenchRecord]) -> list[float]:
    """Successive metric ratios, for sweeps whose axis doubles."""
    vals = [r.metric_value for r in records]
    return [b / a for a, b in zip(vals, vals[1:])]


_RUNNERS = {
    "TauSweepKnapsack": tau_sweep_knapsack,
    "TauSweepPath": tau_sweep_path,
    "TimeVsQ": time_vs_q,
    "TimeVsN": time_vs_n,
    "TimeVsSteps": time_vs_steps,
    "CachedVsUncached": cached_vs_uncached,
}


def run_experiment(name: str, **params) -> list[BenchRecord]:
    if name not in _RUNNERS:
        raise ValueError(f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")
    return _RUNNERS[name](**params)


def write_csv(records: Iterable[BenchRecord], fh: TextIO) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.row())
