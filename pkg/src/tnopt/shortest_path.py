"""Fixed-length shortest walks as a tensor chain, static or time-dependent.

A walk ``v_0 .. v_{n-1}`` has ``n - 1`` hops; hop ``t`` (from ``v_t`` to
``v_{t+1}``) is charged with snapshot ``t`` of the graph.  Every vertex has a
free self-loop, so a walk of ``n`` vertices represents any path with at most
``n - 1`` hops.  The free variables are ``v_1 .. v_{n-2}``; inside the chain
engine variable ``m`` is vertex ``v_{m+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .chain import ChainProblem, Solution, SparseTransition, solve_chain
from .exceptions import InstanceError
from .numerics import NumericReport, Mode, vec_zeros


@dataclass(frozen=True)
class Graph:
    """Weighted graph with implicit zero-cost self-loops.

    ``edges`` lists ``(src, dst, cost)`` as given; an undirected graph lists
    each edge once and is used in both orientations.
    """

    num_vertices: int
    edges: tuple[tuple[int, int, float], ...] = ()
    directed: bool = True

    def __post_init__(self):
        v = int(self.num_vertices)
        if v < 1:
            raise InstanceError("graph needs at least one vertex")
        object.__setattr__(self, "num_vertices", v)
        clean = []
        seen = set()
        for e in self.edges:
            i, j, c = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= i < v and 0 <= j < v):
                raise InstanceError(f"edge ({i}, {j}) has a vertex outside [0, {v})")
            if not (math.isfinite(c) and c >= 0):
                raise InstanceError(f"edge ({i}, {j}) cost must be a finite non-negative real, got {c}")
            if i == j:
                if c != 0:
                    raise InstanceError(f"self-loop at {i} must cost 0")
                continue
            keys = [(i, j)] if self.directed else [(i, j), (j, i)]
            for key in keys:
                if key in seen:
                    raise InstanceError(f"duplicate edge {key}")
                seen.add(key)
            clean.append((i, j, c))
        object.__setattr__(self, "edges", tuple(clean))

    @property
    def V(self) -> int:
        return self.num_vertices

    @cached_property
    def _arcs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directed arcs including self-loops, sorted by (src, dst)."""
        src = [e[0] for e in self.edges]
        dst = [e[1] for e in self.edges]
        cost = [e[2] for e in self.edges]
        if not self.directed:
            src, dst, cost = src + dst, dst + src, cost + cost
        loops = list(range(self.V))
        src = np.array(src + loops, dtype=np.int64)
        dst = np.array(dst + loops, dtype=np.int64)
        cost = np.array(cost + [0.0] * self.V, dtype=float)
        order = np.lexsort((dst, src))
        return src[order], dst[order], cost[order]

    @cached_property
    def indptr(self) -> np.ndarray:
        out = np.zeros(self.V + 1, dtype=np.int64)
        np.cumsum(np.bincount(self._arcs[0], minlength=self.V), out=out[1:])
        return out

    @property
    def arc_count(self) -> int:
        """Directed edges, excluding self-loops."""
        return self._arcs[0].size - self.V

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Successors of ``i`` (self included) and the hop costs."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self._arcs[1][lo:hi], self._arcs[2][lo:hi]

    @cached_property
    def _lookup(self) -> dict[tuple[int, int], float]:
        src, dst, cost = self._arcs
        return dict(zip(zip(src.tolist(), dst.tolist()), cost.tolist()))

    def cost(self, i: int, j: int) -> float:
        """Hop cost, ``inf`` when the edge is absent."""
        return self._lookup.get((int(i), int(j)), math.inf)

    def costs_into(self, d: int) -> np.ndarray:
        out = np.full(self.V, np.inf)
        src, dst, cost = self._arcs
        sel = dst == d
        out[src[sel]] = cost[sel]
        return out

    def transition(self, tau: float) -> SparseTransition:
        src, dst, cost = self._arcs
        return SparseTransition(self.V, self.V, self.indptr, dst, -tau * cost)

    def adjacency(self) -> dict[int, list[tuple[int, float]]]:
        src, dst, cost = self._arcs
        adj: dict[int, list[tuple[int, float]]] = {i: [] for i in range(self.V)}
        for i, j, c in zip(src.tolist(), dst.tolist(), cost.tolist()):
            if i != j:
                adj[i].append((j, c))
        return adj

    def same_as(self, other: "Graph") -> bool:
        return all(np.array_equal(a, b) for a, b in zip(self._arcs, other._arcs)) and self.V == other.V


@dataclass(frozen=True)
class PathProblem:
    """Find the cheapest ``steps``-vertex walk from ``origin`` to ``destination``.

    ``graph`` is a single :class:`Graph` or a sequence of ``steps - 1``
    snapshots, one per hop.
    """

    graph: Graph | tuple[Graph, ...]
    origin: int
    destination: int
    steps: int
    tau: float = 1.0

    def __post_init__(self):
        if not isinstance(self.graph, Graph):
            snaps = tuple(self.graph)
            if not snaps:
                raise InstanceError("time-dependent problem needs at least one snapshot")
            object.__setattr__(self, "graph", snaps)
            if len(snaps) != self.steps - 1:
                raise InstanceError(f"expected {self.steps - 1} snapshots (one per hop), got {len(snaps)}")
            if len({g.V for g in snaps}) != 1:
                raise InstanceError("all snapshots must have the same vertex count")
        if self.steps < 2:
            raise InstanceError("a walk needs at least 2 steps (origin and destination)")
        V = self.V
        for name in ("origin", "destination"):
            x = getattr(self, name)
            if not 0 <= x < V:
                raise InstanceError(f"{name} {x} outside [0, {V})", field=name)
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise InstanceError(f"tau must be a non-negative real, got {self.tau}", field="tau")

    @property
    def time_dependent(self) -> bool:
        return not isinstance(self.graph, Graph)

    @property
    def V(self) -> int:
        return self.graph.V if isinstance(self.graph, Graph) else self.graph[0].V

    def snapshot(self, t: int) -> Graph:
        if not 0 <= t <= self.steps - 2:
            raise IndexError(f"hop {t} outside [0, {self.steps - 2}]")
        return self.graph if isinstance(self.graph, Graph) else self.graph[t]

    def with_tau(self, tau: float) -> "PathProblem":
        return PathProblem(self.graph, self.origin, self.destination, self.steps, float(tau))

    def with_steps(self, steps: int) -> "PathProblem":
        if self.time_dependent:
            raise ValueError("changing the step count of a time-dependent problem is undefined")
        return PathProblem(self.graph, self.origin, self.destination, steps, self.tau)

    def as_time_dependent(self) -> "PathProblem":
        g = self.snapshot(0)
        return PathProblem(tuple([g] * (self.steps - 1)), self.origin, self.destination, self.steps, self.tau)


def path_cost(problem: PathProblem, path: Sequence[int]) -> tuple[float, bool]:
    if len(path) != problem.steps:
        raise ValueError(f"path has {len(path)} vertices, problem has {problem.steps} steps")
    for v in path:
        if not 0 <= v < problem.V:
            raise ValueError(f"vertex {v} outside [0, {problem.V})")
    total = 0.0
    for t in range(problem.steps - 1):
        c = problem.snapshot(t).cost(path[t], path[t + 1])
        if c == math.inf:
            return math.inf, False
        total += c
    return total, True


# -- tensor builders ------------------------------------------------------


def _tau(problem, tau):
    return problem.tau if tau is None else float(tau)


def build_head_sp(problem: PathProblem, m: int, previous: int, tau: float | None = None) -> SparseTransition:
    """Head for step ``m`` (``1 <= m <= n-2``) after arriving from ``previous``.

    Entry ``(i, j)`` carries ``-tau * (E^{m-1}[previous, i] + E^m[i, j])``.
    """
    tau = _tau(problem, tau)
    if not 1 <= m <= problem.steps - 2:
        raise ValueError(f"head step {m} outside [1, {problem.steps - 2}]")
    first = problem.snapshot(m - 1)
    second = problem.snapshot(m)
    mids, c1 = first.neighbors(previous)
    lo = second.indptr[mids]
    counts = second.indptr[mids + 1] - lo
    total = int(counts.sum())
    # Concatenate the CSR row segments of every reachable middle vertex.
    starts = np.repeat(lo - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    idx = starts + np.arange(total)
    arcs_dst, arcs_cost = second._arcs[1], second._arcs[2]
    rows = np.repeat(mids, counts)
    exps = -tau * (np.repeat(c1, counts) + arcs_cost[idx])
    return SparseTransition.from_entries(rows, arcs_dst[idx], exps, problem.V, problem.V)


def build_middle_sp(problem: PathProblem, k: int, tau: float | None = None) -> SparseTransition:
    """Transition for hop ``k``: one entry per edge plus self-loops, ``-tau * E^k``."""
    return problem.snapshot(k).transition(_tau(problem, tau))


def build_terminal_sp(problem: PathProblem, mode: Mode | str = Mode.LINEAR, tau: float | None = None) -> np.ndarray:
    """Closed form for the last two hops into the destination.

    Entry ``i`` sums ``exp(-tau * (E[i, j] + E[j, d]))`` over every ``j``,
    using the two final snapshots; it is the tail seen by vertex ``v_{n-3}``.
    """
    mode = Mode.parse(mode)
    tau = _tau(problem, tau)
    if problem.steps < 3:
        raise ValueError("terminal vector needs at least 3 steps")
    g1 = problem.snapshot(problem.steps - 3)
    into = problem.snapshot(problem.steps - 2).costs_into(problem.destination)
    src, dst, cost = g1._arcs
    hop2 = into[dst]
    ok = np.isfinite(hop2)
    t = SparseTransition.from_entries(src[ok], dst[ok], -tau * (cost[ok] + hop2[ok]), problem.V, problem.V)
    ones = np.ones(problem.V) if mode is Mode.LINEAR else np.zeros(problem.V)
    return t.apply(ones, mode)


class PathChain(ChainProblem):
    maximize = False

    def __init__(self, problem: PathProblem, tau: float | None = None):
        if problem.steps < 3:
            raise ValueError("a chain needs at least one free vertex (steps >= 3)")
        self.problem = problem
        self.tau = _tau(problem, tau)
        self._static = None if problem.time_dependent else problem.graph.transition(self.tau)

    @property
    def num_variables(self) -> int:
        return self.problem.steps - 2

    def domain_size(self, m):
        return self.problem.V

    def head_transition(self, m, prefix):
        previous = prefix[-1] if prefix else self.problem.origin
        return build_head_sp(self.problem, m + 1, previous, self.tau)

    def middle_transition(self, k):
        if self._static is not None:
            return self._static
        return build_middle_sp(self.problem, k + 1, self.tau)

    def closing_vector(self, mode):
        out = vec_zeros(self.problem.V, mode)
        out[self.problem.destination] = 1.0 if mode is Mode.LINEAR else 0.0
        return out

    def terminal_vector(self, mode):
        f = self.num_variables
        if f >= 3:
            return f - 3, build_terminal_sp(self.problem, mode, self.tau)
        return None

    def prefix_exponent(self, prefix):
        walk = [self.problem.origin, *prefix]
        return -self.tau * sum(self.problem.snapshot(t).cost(walk[t], walk[t + 1]) for t in range(len(prefix)))

    def complete(self, decisions):
        return (self.problem.origin, *(int(v) for v in decisions), self.problem.destination)

    def evaluate(self, assignment):
        return path_cost(self.problem, assignment)


def solve_path(
    problem: PathProblem, mode: Mode | str = Mode.LOG, cached: bool = True, tau: float | None = None, record_psi: bool = False
) -> Solution:
    if problem.steps == 2:
        path = (problem.origin, problem.destination)
        cost, ok = path_cost(problem, path)
        return Solution(assignment=path, objective=cost, feasible=ok, numeric=NumericReport())
    return solve_chain(PathChain(problem, tau), mode, cached, record_psi=record_psi)


# -- file format ----------------------------------------------------------
#
#   V <count> directed|undirected
#   origin <v>          optional problem directives
#   destination <v>
#   steps <n>
#   tau <x>
#   <src> <dst> <cost>  one edge per line
#   --- step <t>        starts snapshot t of a time-dependent graph
#
# Blank lines and lines starting with '#' are ignored.

_DIRECTIVES = {"origin": int, "destination": int, "steps": int, "tau": float}


def _fmt(x: float) -> str:
    return repr(float(x))


def dumps_graph(graph: Graph | Sequence[Graph], meta: dict | None = None) -> str:
    snaps = [graph] if isinstance(graph, Graph) else list(graph)
    head = snaps[0]
    lines = [f"V {head.V} {'directed' if head.directed else 'undirected'}"]
    for key in _DIRECTIVES:
        if meta and meta.get(key) is not None:
            val = meta[key]
            lines.append(f"{key} {_fmt(val) if key == 'tau' else int(val)}")
    for t, g in enumerate(snaps):
        if not isinstance(graph, Graph):
            lines.append(f"--- step {t}")
        lines.extend(f"{i} {j} {_fmt(c)}" for i, j, c in g.edges)
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> tuple[Graph | tuple[Graph, ...], dict]:
    header = None
    meta: dict = {}
    blocks: list[list[tuple[int, int, float]]] = []
    current: list | None = None
    timed = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if header is None:
            if len(tok) != 3 or tok[0] != "V" or tok[2] not in ("directed", "undirected"):
                raise InstanceError("expected header 'V <count> directed|undirected'", line=lineno)
            try:
                header = (int(tok[1]), tok[2] == "directed")
            except ValueError:
                raise InstanceError("vertex count must be an integer", line=lineno) from None
            continue
        if tok[0] == "---":
            if len(tok) != 3 or tok[1] != "step" or not tok[2].isdigit() or int(tok[2]) != len(blocks):
                raise InstanceError(f"expected '--- step {len(blocks)}'", line=lineno)
            if current is not None and not timed:
                raise InstanceError("edges before the first '--- step' separator", line=lineno)
            timed = True
            current = []
            blocks.append(current)
            continue
        if tok[0] in _DIRECTIVES:
            if len(tok) != 2 or blocks or current is not None:
                raise InstanceError(f"directive '{tok[0]}' must be 'key value' before any edge", line=lineno)
            try:
                meta[tok[0]] = _DIRECTIVES[tok[0]](tok[1])
            except ValueError:
                raise InstanceError(f"bad value for {tok[0]}", line=lineno, field=tok[0]) from None
            continue
        if len(tok) != 3:
            raise InstanceError("expected an edge 'src dst cost'", line=lineno)
        try:
            edge = (int(tok[0]), int(tok[1]), float(tok[2]))
        except ValueError:
            raise InstanceError("edge endpoints must be integers and cost a real number", line=lineno) from None
        if current is None:
            current = []
            blocks.append(current)
        current.append(edge)
    if header is None:
        raise InstanceError("empty graph file")
    if not blocks:
        blocks.append([])
    V, directed = header
    try:
        graphs = tuple(Graph(V, tuple(b), directed) for b in blocks)
    except InstanceError as exc:
        raise InstanceError(str(exc)) from None
    return (graphs if timed else graphs[0]), meta


def save_graph(graph, path, meta=None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_graph(graph, meta))


def load_graph(path):
    with open(path) as fh:
        return loads_graph(fh.read())


def problem_from_text(text: str, origin=None, destination=None, steps=None, tau=None) -> PathProblem:
    """Parse a graph file, letting explicit arguments override its directives."""
    graph, meta = loads_graph(text)
    vals = {"origin": origin, "destination": destination, "steps": steps, "tau": tau}
    for key in vals:
        if vals[key] is None:
            vals[key] = meta.get(key)
    if isinstance(graph, tuple) and vals["steps"] is None:
        vals["steps"] = len(graph) + 1
    for key in ("origin", "destination", "steps"):
        if vals[key] is None:
            raise InstanceError("missing path-problem parameter", field=key)
    return PathProblem(graph, vals["origin"], vals["destination"], vals["steps"], float(vals["tau"] if vals["tau"] is not None else 1.0))


def problem_to_text(problem: PathProblem) -> str:
    meta = {"origin": problem.origin, "destination": problem.destination, "steps": problem.steps, "tau": problem.tau}
    return dumps_graph(problem.graph, meta)
