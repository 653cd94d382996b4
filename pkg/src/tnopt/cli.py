"""Command-line front end: ``gen``, ``solve``, ``compare`` and ``bench``.

Result documents are JSON on standard output (or ``--out``); benchmarks are
CSV.  Exit statuses: 0 success, 2 usage error, 3 parse error, 4 no feasible
solution, 5 solved but numerically saturated.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Sequence

from . import bench
from .exceptions import InstanceError, NoFeasible, Unreachable
from .generators import random_knapsack, random_path_problem, random_tabulated_knapsack
from .knapsack import TERMINAL_RULES, KnapsackInstance, solve_knapsack
from .knapsack import dumps as dumps_knapsack
from .knapsack import loads as loads_knapsack
from .oracles import (
    ComparisonReport,
    brute_force_path,
    dijkstra,
    dp_knapsack,
    greedy_knapsack,
    knapsack_relative_error,
    path_relative_error,
)
from .shortest_path import PathProblem, problem_from_text, problem_to_text, solve_path

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INFEASIBLE = 4
EXIT_SATURATED = 5


class _Usage(Exception):
    pass


def _int_or_range(text: str):
    if ":" in text:
        lo, hi = text.split(":", 1)
        return int(lo), int(hi)
    return int(text)


def _list(conv):
    def parse(text: str):
        return [conv(t) for t in text.split(",") if t]

    return parse


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(doc: dict) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def read_instance(path: str, args=None) -> KnapsackInstance | PathProblem:
    """Load a knapsack JSON document or a graph text file, detected by content."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        return loads_knapsack(text)
    kw = {}
    if args is not None:
        kw = {k: getattr(args, k, None) for k in ("origin", "destination", "steps")}
    return problem_from_text(text, **kw)


# -- gen ------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.kind == "knapsack":
        inst = random_knapsack(
            args.n, args.c, w_max=args.w_max, capacity_ratio=args.capacity_ratio, capacity=args.capacity,
            normalize=args.normalize, tau=args.tau, seed=args.seed,
        )
        text = dumps_knapsack(inst)
    elif args.kind == "tabulated":
        poly = tuple(args.poly) if args.poly else None
        inst = random_tabulated_knapsack(
            args.n, args.c, w_max=args.w_max, capacity=args.capacity if args.capacity is not None else 30,
            poly=poly, tau=args.tau, seed=args.seed,
        )
        text = dumps_knapsack(inst)
    else:
        pb = random_path_problem(
            args.V, steps=args.steps, p=args.p, tau=args.tau, seed=args.seed, time_dependent=args.time_dependent,
            cost_range=(args.cost_min, args.cost_max), directed=not args.undirected, integer_costs=args.integer_costs,
        )
        text = problem_to_text(pb)
    _emit(text, args.out)
    return EXIT_OK


# -- solve ----------------------------------------------------------------


def _solve(instance, args):
    tau = args.tau
    if isinstance(instance, KnapsackInstance):
        return solve_knapsack(instance, args.mode, cached=not args.no_cache, tau=tau, terminal=args.terminal)
    return solve_path(instance, args.mode, cached=not args.no_cache, tau=tau)


def _effective_tau(instance, args) -> float:
    return instance.tau if args.tau is None else float(args.tau)


def cmd_solve(args) -> int:
    instance = read_instance(args.instance, args)
    kind = "knapsack" if isinstance(instance, KnapsackInstance) else "path"
    doc = {"kind": kind, "mode": args.mode, "cached": not args.no_cache, "tau": _effective_tau(instance, args)}
    try:
        sol = _solve(instance, args)
    except NoFeasible as exc:
        doc.update(feasible=False, error=str(exc))
        _emit(_json(doc), args.out)
        return EXIT_INFEASIBLE
    res = sol.to_dict()
    if kind == "path":
        res["path"] = res.pop("assignment")
    doc.update(res)
    _emit(_json(doc), args.out)
    if not sol.feasible:
        return EXIT_INFEASIBLE
    return EXIT_SATURATED if sol.numeric.saturated else EXIT_OK


# -- compare --------------------------------------------------------------

_BASELINES = {"knapsack": ("greedy", "dp"), "path": ("dijkstra", "brute")}


def cmd_compare(args) -> int:
    instance = read_instance(args.instance, args)
    kind = "knapsack" if isinstance(instance, KnapsackInstance) else "path"
    if args.baseline not in _BASELINES[kind]:
        raise _Usage(f"baseline {args.baseline!r} does not apply to a {kind} instance; choose from {_BASELINES[kind]}")
    if args.baseline == "dijkstra" and instance.time_dependent:
        raise _Usage("dijkstra needs a static graph; use --baseline brute for time-dependent instances")
    t0 = time.perf_counter()
    try:
        if args.baseline == "greedy":
            base = greedy_knapsack(instance).objective
        elif args.baseline == "dp":
            base = dp_knapsack(instance)[0]
        elif args.baseline == "dijkstra":
            base = dijkstra(instance.graph, instance.origin, instance.destination)[0]
        else:
            base = brute_force_path(instance)[0]
    except (Unreachable, ValueError) as exc:
        _emit(_json({"kind": kind, "baseline": args.baseline, "error": str(exc)}), args.out)
        return EXIT_INFEASIBLE
    base_time = time.perf_counter() - t0
    try:
        sol = _solve(instance, args)
        tn = sol.objective
    except NoFeasible:
        tn = -math.inf if kind == "knapsack" else math.inf
        sol = None
    if kind == "knapsack":
        eps = knapsack_relative_error(tn, base)
    else:
        eps = path_relative_error(tn, base)
    report = ComparisonReport(
        tn_objective=tn, baseline_objective=base, relative_error=eps,
        tn_time=sol.elapsed if sol else 0.0, baseline_time=base_time, agree=tn == base, baseline=args.baseline,
    )
    doc = {"kind": kind, "mode": args.mode, "tau": _effective_tau(instance, args), **report.to_dict()}
    _emit(_json(doc), args.out)
    return EXIT_OK


# -- bench ----------------------------------------------------------------


def _bench_params(args) -> dict:
    name = args.experiment
    p: dict = {"seed": args.seed}
    if name not in ("TauSweepKnapsack", "TauSweepPath"):
        p["repetitions"] = args.repetitions
    if args.mode:
        p["mode"] = args.mode
    if args.no_cache and name in ("TimeVsQ", "TimeVsN", "TimeVsSteps"):
        p["cached"] = False
    if name == "TauSweepKnapsack":
        if args.n:
            p["n"] = args.n[0]
        if args.c:
            p["counts"] = args.c
        if args.tau:
            p["taus"] = args.tau
    elif name == "TauSweepPath":
        if args.V:
            p["sizes"] = args.V
        if args.tau:
            p["taus"] = args.tau
    elif name == "TimeVsQ":
        if args.n:
            p["n"] = args.n[0]
        if args.Q:
            p["capacities"] = args.Q
        if args.c:
            p["c"] = args.c[0]
    elif name in ("TimeVsN", "CachedVsUncached"):
        if args.n:
            p["sizes"] = args.n
        if args.Q:
            p["capacity"] = args.Q[0]
        if args.c:
            p["c"] = args.c[0]
    elif name == "TimeVsSteps":
        if args.V:
            p["V"] = args.V[0]
        if args.steps:
            p["steps"] = args.steps
    if args.tau and name not in ("TauSweepKnapsack", "TauSweepPath"):
        p["tau"] = args.tau[0]
    return p


def cmd_bench(args) -> int:
    records = bench.run_experiment(args.experiment, **_bench_params(args))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            bench.write_csv(records, fh)
    else:
        bench.write_csv(records, sys.stdout)
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def _solver_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("instance", help="knapsack JSON document or graph text file")
    sp.add_argument("--tau", type=float, default=None, help="override the instance's tau")
    sp.add_argument("--mode", choices=("linear", "log"), default="log")
    sp.add_argument("--no-cache", action="store_true", help="recontract tails at every step")
    sp.add_argument("--terminal", choices=TERMINAL_RULES, default="trace", help="knapsack last-class rule")
    sp.add_argument("--origin", type=int, default=None)
    sp.add_argument("--destination", type=int, default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tnopt", description="Tensor-chain solvers for knapsack and n-step shortest path.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded random instance")
    g.add_argument("kind", choices=("knapsack", "tabulated", "graph"))
    g.add_argument("--n", type=int, default=10, help="number of classes")
    g.add_argument("--c", type=_int_or_range, default=1, help="class count, or lo:hi range")
    g.add_argument("--w-max", type=int, default=10)
    g.add_argument("--capacity-ratio", type=float, default=0.8)
    g.add_argument("--capacity", type=int, default=None)
    g.add_argument("--normalize", action="store_true", help="divide values by the class count")
    g.add_argument("--poly", type=_list(int), default=None, help="outer polynomial coefficients, e.g. 0,0,1")
    g.add_argument("--V", type=int, default=10, help="vertex count")
    g.add_argument("--p", type=float, default=0.2, help="edge probability")
    g.add_argument("--steps", type=int, default=None, help="walk length n (default V)")
    g.add_argument("--cost-min", type=float, default=1.0)
    g.add_argument("--cost-max", type=float, default=10.0)
    g.add_argument("--integer-costs", action="store_true")
    g.add_argument("--undirected", action="store_true")
    g.add_argument("--time-dependent", action="store_true")
    g.add_argument("--tau", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance file")
    _solver_flags(s)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("compare", help="solve and compare against a baseline")
    _solver_flags(c)
    c.add_argument("--baseline", choices=("greedy", "dp", "dijkstra", "brute"), required=True)
    c.set_defaults(func=cmd_compare)

    b = sub.add_parser("bench", help="run a benchmark experiment and emit CSV")
    b.add_argument("experiment", choices=bench.EXPERIMENTS)
    b.add_argument("--n", type=_list(int), default=None, help="comma-separated class counts n")
    b.add_argument("--Q", type=_list(int), default=None, help="comma-separated capacities")
    b.add_argument("--c", type=_list(int), default=None, help="comma-separated per-class counts")
    b.add_argument("--V", type=_list(int), default=None, help="comma-separated vertex counts")
    b.add_argument("--steps", type=_list(int), default=None, help="comma-separated step counts")
    b.add_argument("--tau", type=_list(float), default=None, help="comma-separated tau values")
    b.add_argument("--mode", choices=("linear", "log"), default=None)
    b.add_argument("--no-cache", action="store_true")
    b.add_argument("--repetitions", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
