"""Bounded knapsack as a tensor chain, including the nonlinear and
polynomial-constraint variants.

Every item class is stored as a pair of tables ``weights[y]``, ``values[y]``
for ``y = 0..c`` (how many items of the class are taken).  The classic
problem is the special case ``weights[y] = y*w``, ``values[y] = y*v``.  The
chain state threaded between classes is the accumulated weight ``0..Q``.
"""

from __future__ import annotations

import functools
import json
import math
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain import BandedTransition, ChainProblem, SparseTransition, Solution, solve_chain
from .exceptions import InstanceError
from .numerics import Mode, vec_from_exponents, vec_zeros

TERMINAL_RULES = ("trace", "best")


def _as_int(x, what: str) -> int:
    if isinstance(x, bool):
        raise InstanceError(f"{what} must be an integer, got {x!r}")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)) and float(x).is_integer():
        return int(x)
    raise InstanceError(f"{what} must be an integer, got {x!r}; rescale real-valued weights to integers")


@dataclass(frozen=True)
class ItemClass:
    weights: tuple[int, ...]
    values: tuple[float, ...]
    # (w, v) when built from the classic form, kept for lossless round trips.
    unit: tuple[int, float] | None = None

    @classmethod
    def classic(cls, w, v, c) -> "ItemClass":
        w = _as_int(w, "class weight")
        c = _as_int(c, "class count")
        v = float(v)
        if w < 0:
            raise InstanceError(f"class weight must be non-negative, got {w}")
        if c < 1:
            raise InstanceError(f"class count must be at least 1, got {c}")
        if not (v > 0 and math.isfinite(v)):
            raise InstanceError(f"classic class value must be a positive real, got {v}")
        ys = range(c + 1)
        return cls(tuple(y * w for y in ys), tuple(y * v for y in ys), unit=(w, v))

    @classmethod
    def tabulated(cls, weights: Sequence, values: Sequence) -> "ItemClass":
        ws = tuple(_as_int(w, "tabulated weight") for w in weights)
        vs = tuple(float(v) for v in values)
        if len(ws) != len(vs) or len(ws) < 2:
            raise InstanceError("tabulated class needs equal-length weight and value tables with at least 2 entries")
        if ws[0] != 0 or vs[0] != 0.0:
            raise InstanceError("selecting zero items must add zero weight and zero value (weights[0]=values[0]=0)")
        if min(ws) < 0:
            raise InstanceError("tabulated weights must be non-negative")
        if not all(math.isfinite(v) for v in vs):
            raise InstanceError("tabulated values must be finite")
        return cls(ws, vs)

    @property
    def count(self) -> int:
        return len(self.weights) - 1

    @functools.cached_property
    def w_table(self) -> np.ndarray:
        out = np.asarray(self.weights, dtype=np.int64)
        out.flags.writeable = False
        return out

    @functools.cached_property
    def v_table(self) -> np.ndarray:
        out = np.asarray(self.values, dtype=float)
        out.flags.writeable = False
        return out

    @functools.cached_property
    def strictly_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.weights, self.weights[1:]))


@dataclass(frozen=True)
class OuterConstraint:
    """A map ``F`` applied to the total weight; feasibility is ``F(W) <= Q``.

    ``poly`` holds integer coefficients ``a0, a1, ...``; ``table`` holds
    ``F(z)`` for ``z = 0..len(table)-1`` and any larger weight is infeasible.
    """

    poly: tuple[int, ...] | None = None
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if (self.poly is None) == (self.table is None):
            raise InstanceError("outer constraint needs exactly one of 'poly' or 'table'")
        if self.poly is not None:
            coeffs = tuple(_as_int(a, "polynomial coefficient") for a in self.poly)
            if any(a < 0 for a in coeffs):
                raise InstanceError("polynomial coefficients must be non-negative integers")
            # F(z) >= z keeps every feasible weight inside 0..Q.
            if not any(a >= 1 for a in coeffs[1:]):
                raise InstanceError("polynomial needs a positive non-constant coefficient so that F(z) >= z")
            object.__setattr__(self, "poly", coeffs)

    def evaluate(self, z: int) -> float:
        if self.poly is not None:
            acc = 0
            for a in reversed(self.poly):
                acc = acc * z + a
            return acc
        if z >= len(self.table):
            return math.inf
        return self.table[z]

    def evaluate_range(self, size: int) -> np.ndarray:
        return np.array([float(self.evaluate(z)) for z in range(size)])

    def to_dict(self) -> dict:
        return {"poly": list(self.poly)} if self.poly is not None else {"table": list(self.table)}


@dataclass(frozen=True)
class KnapsackInstance:
    classes: tuple[ItemClass, ...]
    capacity: int
    tau: float = 1.0
    outer: OuterConstraint | None = None

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "capacity", _as_int(self.capacity, "capacity"))
        if self.capacity < 0:
            raise InstanceError("capacity must be non-negative")
        if not self.classes:
            raise InstanceError("instance needs at least one item class")
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise InstanceError(f"tau must be a non-negative real, got {self.tau}")

    @classmethod
    def classic(cls, weights, values, counts, capacity, tau=1.0, outer=None) -> "KnapsackInstance":
        if not (len(weights) == len(values) == len(counts)):
            raise InstanceError("weights, values and counts must have equal length")
        classes = tuple(ItemClass.classic(w, v, c) for w, v, c in zip(weights, values, counts))
        return cls(classes, capacity, float(tau), outer)

    @property
    def n(self) -> int:
        return len(self.classes)

    @property
    def is_classic(self) -> bool:
        return self.outer is None and all(c.unit is not None for c in self.classes)

    def with_tau(self, tau: float) -> "KnapsackInstance":
        return KnapsackInstance(self.classes, self.capacity, float(tau), self.outer)

    def constrained(self, w: int) -> float:
        return w if self.outer is None else self.outer.evaluate(w)

    def assignment_count(self) -> int:
        return math.prod(c.count + 1 for c in self.classes)


def objective(instance: KnapsackInstance, assignment: Sequence[int]) -> tuple[float, int, bool]:
    """Exact value, weight and feasibility of an assignment."""
    if len(assignment) != instance.n:
        raise ValueError(f"assignment has {len(assignment)} entries, instance has {instance.n} classes")
    value = 0.0
    weight = 0
    for i, (cls, x) in enumerate(zip(instance.classes, assignment)):
        x = int(x)
        if not 0 <= x <= cls.count:
            raise ValueError(f"assignment[{i}] = {x} outside [0, {cls.count}]")
        value += cls.values[x]
        weight += cls.weights[x]
    return value, weight, instance.constrained(weight) <= instance.capacity


# -- tensor builders ------------------------------------------------------


def _tau(instance, tau):
    return instance.tau if tau is None else float(tau)


def build_head(
    instance: KnapsackInstance, m: int, prefix: Sequence[int], tau: float | None = None, offset: int | None = None
) -> SparseTransition:
    """Head tensor for class ``m`` after classes ``0..m-1`` were fixed to ``prefix``.

    Row ``x`` (items taken from class ``m``) maps to the weight column
    ``prefix_weight + w[m][x]`` with exponent ``tau * v[m][x]``.  ``offset``
    may pass the prefix weight when the caller already knows it.
    """
    tau = _tau(instance, tau)
    q = instance.capacity
    if offset is None:
        offset = sum(instance.classes[k].weights[x] for k, x in enumerate(prefix))
    if offset > q:
        raise ValueError(f"prefix weight {offset} already exceeds capacity {q}")
    cls = instance.classes[m]
    size = cls.count + 1
    fit = _fitting_prefix(cls, offset, q, tau)
    if fit is not None:
        k, cols, exps = fit
        return SparseTransition._one_per_row(np.arange(k), cols, exps, size, q + 1)
    cols = offset + cls.w_table
    ok = cols <= q
    return SparseTransition.from_entries(np.arange(size)[ok], cols[ok], (tau * cls.v_table)[ok], size, q + 1)


def _fitting_prefix(cls: ItemClass, offset: int, q: int, tau: float):
    """``(k, cols, exps)`` when the rows that fit are exactly ``0..k-1``, else None."""
    if not (cls.strictly_increasing and math.isfinite(tau * max(map(abs, cls.values)))):
        return None
    cols = offset + cls.w_table
    k = cls.count + 1 if cols[-1] <= q else int(np.searchsorted(cols, q, side="right"))
    return k, cols[:k], (tau * cls.v_table)[:k]


def build_middle(instance: KnapsackInstance, k: int, tau: float | None = None) -> BandedTransition:
    """Weight-state transition for class ``k``: ``i -> i + w[k][y]`` when it fits.

    Classic classes give ``c + 1`` constant diagonals; tabulated classes with
    repeated weights merge onto one diagonal.
    """
    tau = _tau(instance, tau)
    cls = instance.classes[k]
    exps = tau * cls.v_table
    if cls.strictly_increasing and cls.weights[-1] <= instance.capacity and math.isfinite(exps[-1]):
        return BandedTransition._trusted(instance.capacity + 1, cls.w_table, exps)
    return BandedTransition(instance.capacity + 1, cls.w_table, exps)


def _feasible_final(instance: KnapsackInstance) -> np.ndarray:
    q = instance.capacity
    if instance.outer is None:
        return np.ones(q + 1, dtype=bool)
    return instance.outer.evaluate_range(q + 1) <= q


def build_terminal(instance: KnapsackInstance, rule: str = "best", mode: Mode | str = Mode.LINEAR, tau: float | None = None) -> np.ndarray:
    """Vector over the weight state entering the last class.

    ``rule="best"`` keeps only the best completion of the last class per
    state: for classic classes ``y = min((Q - i) // w, c)``, otherwise the
    feasible ``y`` of largest value (smallest ``y`` on ties).
    ``rule="trace"`` sums the amplitudes of every feasible completion, which
    makes the chain reproduce the full sum over assignments exactly.
    """
    mode = Mode.parse(mode)
    tau = _tau(instance, tau)
    q = instance.capacity
    last = instance.classes[-1]
    states = np.arange(q + 1)
    if rule == "best":
        if last.unit is not None and instance.outer is None:
            w, _ = last.unit
            ys = np.full(q + 1, last.count) if w == 0 else np.minimum((q - states) // w, last.count)
            return vec_from_exponents(tau * last.v_table[ys], mode)
        final_ok = _feasible_final(instance)
        mu = states[:, None] + last.w_table[None, :]
        ok = mu <= q
        ok[ok] = final_ok[mu[ok]]
        cand = np.where(ok, last.v_table[None, :], -np.inf)
        best = np.argmax(cand, axis=1)  # first maximum: smallest y on ties
        out = vec_zeros(q + 1, mode)
        has = ok.any(axis=1)
        out[has] = vec_from_exponents(tau * last.v_table[best[has]], mode)
        return out
    if rule == "trace":
        t = build_middle(instance, instance.n - 1, tau)
        return t.apply(closing_vector(instance, mode), mode)
    raise ValueError(f"unknown terminal rule {rule!r}; expected one of {TERMINAL_RULES}")


def closing_vector(instance: KnapsackInstance, mode: Mode | str = Mode.LINEAR) -> np.ndarray:
    """Indicator of final weights satisfying the (outer) capacity constraint."""
    mode = Mode.parse(mode)
    ok = _feasible_final(instance)
    return np.where(ok, 1.0, 0.0) if mode is Mode.LINEAR else np.where(ok, 0.0, -np.inf)


class KnapsackChain(ChainProblem):
    """Chain adapter: variable ``m`` is the item count of class ``m``."""

    maximize = True

    def __init__(self, instance: KnapsackInstance, tau: float | None = None, terminal: str = "trace"):
        if terminal not in TERMINAL_RULES:
            raise ValueError(f"unknown terminal rule {terminal!r}")
        self.instance = instance
        self.tau = _tau(instance, tau)
        self.terminal = terminal
        self._memo = threading.local()

    def _prefix_weight(self, prefix) -> int:
        # Decimation grows one prefix; remember its running weights.
        memo = self._memo
        seen = getattr(memo, "seen", None)
        grown = getattr(memo, "source", None) is prefix and len(prefix) >= len(seen)
        if not grown and (seen is None or len(prefix) < len(seen) or list(prefix[: len(seen)]) != seen):
            memo.seen = seen = []
            memo.cum = [0]
        memo.source = prefix
        cum = memo.cum
        classes = self.instance.classes
        for k in range(len(seen), len(prefix)):
            x = int(prefix[k])
            cum.append(cum[-1] + classes[k].weights[x])
            seen.append(x)
        return cum[len(prefix)]

    @property
    def num_variables(self) -> int:
        return self.instance.n

    def domain_size(self, m: int) -> int:
        return self.instance.classes[m].count + 1

    def head_transition(self, m, prefix):
        return build_head(self.instance, m, prefix, self.tau, offset=self._prefix_weight(prefix))

    def project(self, m, prefix, tail, mode):
        offset = self._prefix_weight(prefix)
        cls = self.instance.classes[m]
        fit = _fitting_prefix(cls, offset, self.instance.capacity, self.tau) if offset <= self.instance.capacity else None
        if fit is None:
            return super().project(m, prefix, tail, mode)
        # Same gather as the one-entry-per-row head apply.
        k, cols, exps = fit
        if mode is Mode.LOG:
            out = np.full(cls.count + 1, -np.inf)
            out[:k] = exps + tail[cols]
            return out, k
        out = np.zeros(cls.count + 1)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.exp(exps) * tail[cols]
        vals[np.isnan(vals)] = 0.0
        out[:k] = vals
        return out, k

    def middle_transition(self, k):
        return build_middle(self.instance, k, self.tau)

    def closing_vector(self, mode):
        return closing_vector(self.instance, mode)

    def terminal_vector(self, mode):
        if self.terminal == "best" and self.instance.n >= 2:
            return self.instance.n - 2, build_terminal(self.instance, "best", mode, self.tau)
        return None

    def prefix_exponent(self, prefix):
        return self.tau * sum(self.instance.classes[k].values[x] for k, x in enumerate(prefix))

    def complete(self, decisions):
        return tuple(int(x) for x in decisions)

    def evaluate(self, assignment):
        value, _, feasible = objective(self.instance, assignment)
        return value, feasible


def solve_knapsack(
    instance: KnapsackInstance,
    mode: Mode | str = Mode.LOG,
    cached: bool = True,
    tau: float | None = None,
    terminal: str = "trace",
    record_psi: bool = False,
) -> Solution:
    return solve_chain(KnapsackChain(instance, tau, terminal), mode, cached, record_psi=record_psi)


def suggest_tau(instance: KnapsackInstance, mode: Mode | str = Mode.LOG) -> float:
    """Advisory starting point for ``tau``; not a guarantee of exactness.

    Linear mode: the largest tau whose total amplitude still fits in a double.
    Log mode: tau at which one unit of the smallest positive per-item value
    outweighs the log of the number of assignments.
    """
    mode = Mode.parse(mode)
    vmax_total = sum(max(c.values) for c in instance.classes) or 1.0
    log_count = math.log(instance.assignment_count())
    if mode is Mode.LINEAR:
        return max((709.0 - log_count) / vmax_total, 0.0)
    steps = [abs(b - a) for c in instance.classes for a, b in zip(c.values, c.values[1:]) if b != a]
    delta = min(steps) if steps else 1.0
    return max(log_count, 1.0) / delta


def expand_01(instance: KnapsackInstance) -> KnapsackInstance:
    """Replace each classic class of count ``c`` by ``c`` single-item classes."""
    if not instance.is_classic:
        raise ValueError("0-1 expansion is defined for classic instances")
    classes = []
    for cls in instance.classes:
        w, v = cls.unit
        classes.extend(ItemClass.classic(w, v, 1) for _ in range(cls.count))
    return KnapsackInstance(tuple(classes), instance.capacity, instance.tau)


# -- file format ----------------------------------------------------------


def instance_to_dict(instance: KnapsackInstance) -> dict:
    classes = []
    for cls in instance.classes:
        if cls.unit is not None:
            classes.append({"w": cls.unit[0], "v": cls.unit[1], "c": cls.count})
        else:
            classes.append({"weights": list(cls.weights), "values": list(cls.values)})
    doc = {"kind": "knapsack", "capacity": instance.capacity, "tau": instance.tau, "classes": classes}
    if instance.outer is not None:
        doc["outer"] = instance.outer.to_dict()
    return doc


def instance_from_dict(doc: dict) -> KnapsackInstance:
    if not isinstance(doc, dict):
        raise InstanceError("knapsack document must be a JSON object")
    if doc.get("kind", "knapsack") != "knapsack":
        raise InstanceError(f"document kind is {doc.get('kind')!r}, expected 'knapsack'", field="kind")
    for key in ("capacity", "classes"):
        if key not in doc:
            raise InstanceError("missing required field", field=key)
    raw = doc["classes"]
    if not isinstance(raw, list) or not raw:
        raise InstanceError("must be a non-empty list", field="classes")
    classes = []
    for i, entry in enumerate(raw):
        where = f"classes[{i}]"
        try:
            if isinstance(entry, dict) and {"w", "v", "c"} <= entry.keys():
                classes.append(ItemClass.classic(entry["w"], entry["v"], entry["c"]))
            elif isinstance(entry, dict) and {"weights", "values"} <= entry.keys():
                classes.append(ItemClass.tabulated(entry["weights"], entry["values"]))
            else:
                raise InstanceError("class needs either {w, v, c} or {weights, values}")
        except InstanceError as exc:
            raise InstanceError(str(exc), field=where) from None
        except (TypeError, ValueError) as exc:
            raise InstanceError(f"malformed class: {exc}", field=where) from None
    outer = None
    if doc.get("outer") is not None:
        outer_doc = doc["outer"]
        if not isinstance(outer_doc, dict):
            raise InstanceError("must be an object", field="outer")
        try:
            outer = OuterConstraint(
                poly=tuple(outer_doc["poly"]) if "poly" in outer_doc else None,
                table=tuple(float(t) for t in outer_doc["table"]) if "table" in outer_doc else None,
            )
        except InstanceError as exc:
            raise InstanceError(str(exc), field="outer") from None
    try:
        tau = float(doc.get("tau", 1.0))
    except (TypeError, ValueError):
        raise InstanceError("must be a number", field="tau") from None
    try:
        return KnapsackInstance(tuple(classes), doc["capacity"], tau, outer)
    except InstanceError as exc:
        raise InstanceError(str(exc), field="capacity" if "capacity" in str(exc) else None) from None


def dumps(instance: KnapsackInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=1) + "\n"


def loads(text: str) -> KnapsackInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return instance_from_dict(doc)


def save(instance: KnapsackInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(instance))


def load(path) -> KnapsackInstance:
    with open(path) as fh:
        return loads(fh.read())
