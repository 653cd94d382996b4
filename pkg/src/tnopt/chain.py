"""One-dimensional tensor-chain contraction with decimation.

A problem is expressed as a chain of sparse transitions.  Variable ``m`` is
read off by contracting a problem-supplied head tensor (which already carries
the values fixed for variables ``0..m-1``) with the tail vector
``tails[m]``: the contraction of everything below that head.  Tails do not
depend on the fixed prefix, so a single backward sweep computes all of them
and decimation costs one extra sparse product per variable.  The uncached
path recontracts the tail from the bottom at every step instead.

Indexing used throughout::

    tails[F-1] = problem.closing_vector()
    tails[k-1] = problem.middle_transition(k) @ tails[k]      k = F-1 .. 1
    psi_m      = problem.head_transition(m, prefix) @ tails[m]

where ``F = problem.num_variables``.  A problem may also supply a closed-form
``terminal_vector`` that replaces the product at one tail position.
"""

from __future__ import annotations

import abc
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import NoFeasible
from .numerics import Mode, NumericReport, argmax_with_margin, vec_from_exponents, vec_scale, vec_zeros


class SparseTransition:
    """Sparse matrix of amplitudes ``exp(exponent)`` stored row-compressed.

    Absent entries are zero amplitudes.  ``apply(vec)`` computes
    ``out[r] = sum_c exp(E[r, c]) * vec[c]`` in either numeric mode, touching
    each stored entry once.
    """

    __slots__ = ("in_dim", "out_dim", "indptr", "cols", "exponents", "_rows_nz", "_starts", "_counts", "_weights")

    def __init__(self, in_dim: int, out_dim: int, indptr: np.ndarray, cols: np.ndarray, exponents: np.ndarray):
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.indptr = indptr
        self.cols = cols
        self.exponents = exponents
        counts = np.diff(indptr)
        self._rows_nz = np.flatnonzero(counts)
        self._starts = indptr[:-1][self._rows_nz]
        self._counts = counts[self._rows_nz]
        self._weights = None

    @classmethod
    def from_entries(cls, rows, cols, exponents, in_dim: int, out_dim: int) -> "SparseTransition":
        """Build from coordinate lists.

        Entries with exponent ``-inf`` are dropped; duplicate ``(row, col)``
        pairs are merged by adding their amplitudes.
        """
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        exps = np.asarray(exponents, dtype=float).ravel()
        if not (rows.shape == cols.shape == exps.shape):
            raise ValueError("rows, cols and exponents must have equal length")
        if np.isnan(exps).any() or (exps == np.inf).any():
            raise ValueError("transition exponents must be finite (or -inf for absent entries)")
        keep = exps > -np.inf
        if not keep.all():
            rows, cols, exps = rows[keep], cols[keep], exps[keep]
        if rows.size:
            if rows.min() < 0 or rows.max() >= in_dim or cols.min() < 0 or cols.max() >= out_dim:
                raise ValueError("transition entry index out of range")
        key = rows * out_dim + cols
        if key.size > 1 and not (np.diff(key) > 0).all():
            order = np.argsort(key, kind="stable")
            key, rows, cols, exps = key[order], rows[order], cols[order], exps[order]
            first = np.ones(key.size, dtype=bool)
            first[1:] = key[1:] != key[:-1]
            if not first.all():
                starts = np.flatnonzero(first)
                exps = np.logaddexp.reduceat(exps, starts)
                rows, cols = rows[starts], cols[starts]
        indptr = np.zeros(in_dim + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=in_dim), out=indptr[1:])
        return cls(in_dim, out_dim, indptr, cols, exps)

    @classmethod
    def _one_per_row(cls, rows: np.ndarray, cols: np.ndarray, exps: np.ndarray, in_dim: int, out_dim: int) -> "SparseTransition":
        # Trusted builder: strictly increasing rows, finite exponents, in range.
        indptr = np.zeros(in_dim + 1, dtype=np.int64)
        indptr[rows + 1] = 1
        np.cumsum(indptr, out=indptr)
        self = cls.__new__(cls)
        self.in_dim, self.out_dim = in_dim, out_dim
        self.indptr, self.cols, self.exponents = indptr, cols, exps
        self._rows_nz, self._starts, self._counts = rows, None, None
        self._weights = None
        return self

    @classmethod
    def from_generator(
        cls, in_dim: int, out_dim: int, row_entries: Callable[[int], Iterable[tuple[int, float]]]
    ) -> "SparseTransition":
        rows, cols, exps = [], [], []
        for r in range(in_dim):
            for c, e in row_entries(r):
                rows.append(r)
                cols.append(c)
                exps.append(e)
        return cls.from_entries(rows, cols, exps, in_dim, out_dim)

    @property
    def nnz(self) -> int:
        return int(self.cols.size)

    @property
    def shape(self) -> tuple[int, int]:
        return self.in_dim, self.out_dim

    def rows(self) -> np.ndarray:
        return np.repeat(np.arange(self.in_dim), np.diff(self.indptr))

    def entries(self) -> set[tuple[int, int, float]]:
        return set(zip(self.rows().tolist(), self.cols.tolist(), self.exponents.tolist()))

    def to_dense(self, mode: Mode = Mode.LINEAR) -> np.ndarray:
        out = vec_zeros(self.in_dim * self.out_dim, mode).reshape(self.in_dim, self.out_dim)
        out[self.rows(), self.cols] = vec_from_exponents(self.exponents, mode)
        return out

    def same_as(self, other: "SparseTransition") -> bool:
        """Bit-identical structure and exponents."""
        return (
            self.shape == other.shape
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.exponents, other.exponents)
        )

    def apply(self, vec: np.ndarray, mode: Mode) -> np.ndarray:
        if vec.shape != (self.out_dim,):
            raise ValueError(f"vector of length {vec.shape} does not match transition with {self.out_dim} columns")
        if self._starts is None:
            return self._apply_single(vec, mode)
        if mode is Mode.LOG:
            out = np.full(self.in_dim, -np.inf)
            if not self.cols.size:
                return out
            vals = self.exponents + vec[self.cols]
            peak = np.maximum.reduceat(vals, self._starts)
            shift = np.where(np.isfinite(peak), peak, 0.0)
            with np.errstate(divide="ignore"):
                sums = np.add.reduceat(np.exp(vals - np.repeat(shift, self._counts)), self._starts)
                out[self._rows_nz] = shift + np.log(sums)
            return out
        out = np.zeros(self.in_dim)
        if not self.cols.size:
            return out
        if self._weights is None:
            with np.errstate(over="ignore"):
                self._weights = np.exp(self.exponents)
        with np.errstate(invalid="ignore", over="ignore"):
            vals = self._weights * vec[self.cols]
        # inf * 0 from overflowed weights: a zero amplitude still absorbs.
        vals[np.isnan(vals)] = 0.0
        with np.errstate(invalid="ignore", over="ignore"):
            out[self._rows_nz] = np.add.reduceat(vals, self._starts)
        return out

    def _apply_single(self, vec: np.ndarray, mode: Mode) -> np.ndarray:
        # At most one entry per row: a gather, no reduction.
        if mode is Mode.LOG:
            out = np.full(self.in_dim, -np.inf)
            out[self._rows_nz] = self.exponents + vec[self.cols]
            return out
        out = np.zeros(self.in_dim)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.exp(self.exponents) * vec[self.cols]
        vals[np.isnan(vals)] = 0.0
        out[self._rows_nz] = vals
        return out

    def __repr__(self) -> str:
        return f"SparseTransition({self.in_dim}x{self.out_dim}, nnz={self.nnz})"


class BandedTransition:
    """Square transition made of constant diagonals: ``E[i, i + offset] = exponent``.

    Same interface as :class:`SparseTransition`; rows whose target column
    would exceed the dimension simply have no entry on that diagonal.
    """

    __slots__ = ("in_dim", "out_dim", "offsets", "band_exponents", "_nnz")

    def __init__(self, size: int, offsets, exponents):
        offsets = np.asarray(offsets, dtype=np.int64).ravel()
        exps = np.asarray(exponents, dtype=float).ravel()
        if offsets.shape != exps.shape:
            raise ValueError("offsets and exponents must have equal length")
        self.in_dim = self.out_dim = int(size)
        if offsets.size and offsets[0] >= 0 and offsets[-1] < size and np.isfinite(exps).all():
            if offsets.size == 1 or (np.diff(offsets) > 0).all():
                self.offsets, self.band_exponents = offsets, exps
                self._nnz = None
                return
        if (offsets < 0).any():
            raise ValueError("diagonal offsets must be non-negative")
        if np.isnan(exps).any() or (exps == np.inf).any():
            raise ValueError("transition exponents must be finite (or -inf for absent diagonals)")
        keep = (exps > -np.inf) & (offsets < size)
        offsets, exps = offsets[keep], exps[keep]
        order = np.argsort(offsets, kind="stable")
        offsets, exps = offsets[order], exps[order]
        if offsets.size > 1 and not (np.diff(offsets) > 0).all():
            first = np.ones(offsets.size, dtype=bool)
            first[1:] = offsets[1:] != offsets[:-1]
            starts = np.flatnonzero(first)
            exps = np.logaddexp.reduceat(exps, starts)
            offsets = offsets[starts]
        self.offsets = offsets
        self.band_exponents = exps
        self._nnz = None

    @classmethod
    def _trusted(cls, size: int, offsets: np.ndarray, exponents: np.ndarray) -> "BandedTransition":
        # Caller guarantees strictly increasing in-range offsets and finite exponents.
        self = cls.__new__(cls)
        self.in_dim = self.out_dim = size
        self.offsets, self.band_exponents, self._nnz = offsets, exponents, None
        return self

    @property
    def nnz(self) -> int:
        if self._nnz is None:
            self._nnz = self.in_dim * len(self.offsets) - sum(self.offsets.tolist())
        return self._nnz

    @property
    def shape(self) -> tuple[int, int]:
        return self.in_dim, self.out_dim

    def to_sparse(self) -> SparseTransition:
        n = self.in_dim
        rows = np.arange(n)[:, None] + np.zeros_like(self.offsets)[None, :]
        cols = rows + self.offsets[None, :]
        exps = np.broadcast_to(self.band_exponents, cols.shape)
        ok = cols < n
        return SparseTransition.from_entries(rows[ok], cols[ok], exps[ok], n, n)

    def entries(self) -> set[tuple[int, int, float]]:
        return self.to_sparse().entries()

    def to_dense(self, mode: Mode = Mode.LINEAR) -> np.ndarray:
        return self.to_sparse().to_dense(mode)

    def same_as(self, other) -> bool:
        if isinstance(other, BandedTransition):
            return (
                self.in_dim == other.in_dim
                and np.array_equal(self.offsets, other.offsets)
                and np.array_equal(self.band_exponents, other.band_exponents)
            )
        return self.to_sparse().same_as(other)

    def apply(self, vec: np.ndarray, mode: Mode) -> np.ndarray:
        n = self.in_dim
        if vec.shape != (n,):
            raise ValueError(f"vector of length {vec.shape} does not match transition with {n} columns")
        bands = list(zip(self.offsets.tolist(), self.band_exponents.tolist()))
        if mode is Mode.LOG:
            peak = np.full(n, -np.inf)
            for o, e in bands:
                np.maximum(peak[: n - o], vec[o:] + e, out=peak[: n - o])
            shift = np.where(peak > -np.inf, peak, 0.0)
            acc = np.zeros(n)
            for o, e in bands:
                acc[: n - o] += np.exp(vec[o:] + (e - shift[: n - o]))
            with np.errstate(divide="ignore"):
                return shift + np.log(acc)
        out = np.zeros(n)
        with np.errstate(over="ignore", invalid="ignore"):
            for o, e in bands:
                term = math.exp(e) * vec[o:] if e < 709.0 else np.exp(e) * vec[o:]
                term[vec[o:] == 0.0] = 0.0
                out[: n - o] += term
        return out

    def __repr__(self) -> str:
        return f"BandedTransition({self.in_dim}x{self.out_dim}, bands={self.offsets.size})"


class ChainProblem(abc.ABC):
    """What a solver front-end provides to the engine.

    ``maximize`` selects the sign convention of the reported objective; the
    sign of the exponents is the front-end's responsibility.
    """

    maximize: bool = True

    @property
    @abc.abstractmethod
    def num_variables(self) -> int: ...

    @abc.abstractmethod
    def domain_size(self, m: int) -> int: ...

    @abc.abstractmethod
    def head_transition(self, m: int, prefix: Sequence[int]) -> SparseTransition: ...

    @abc.abstractmethod
    def middle_transition(self, k: int) -> SparseTransition: ...

    @abc.abstractmethod
    def closing_vector(self, mode: Mode) -> np.ndarray: ...

    def project(self, m: int, prefix: Sequence[int], tail: np.ndarray, mode: Mode) -> tuple[np.ndarray, int]:
        """Head contraction ``head_transition(m, prefix) @ tail`` and its multiply-add count.

        Front-ends may override this with a cheaper equivalent.
        """
        head = self.head_transition(m, prefix)
        return head.apply(tail, mode), head.nnz

    def terminal_vector(self, mode: Mode) -> tuple[int, np.ndarray] | None:
        """Optional closed form ``(position, vector)`` for one tail."""
        return None

    def prefix_exponent(self, prefix: Sequence[int]) -> float:
        """Exponent of the amplitude factor contributed by fixed variables."""
        return 0.0

    @abc.abstractmethod
    def complete(self, decisions: Sequence[int]) -> tuple[int, ...]:
        """Turn the decimated variables into the reported assignment."""

    @abc.abstractmethod
    def evaluate(self, assignment: Sequence[int]) -> tuple[float, bool]:
        """Exact objective and feasibility of a complete assignment."""


@dataclass
class ChainCache:
    """Prefix-independent tail vectors from one backward sweep."""

    tails: list[np.ndarray]
    mode: Mode
    numeric: NumericReport
    multiply_adds: int = 0


@dataclass
class Solution:
    assignment: tuple[int, ...]
    objective: float
    feasible: bool
    numeric: NumericReport = field(default_factory=NumericReport)
    margins: list[float] = field(default_factory=list)
    elapsed: float = 0.0
    psi: list[np.ndarray] | None = None
    multiply_adds: int = 0

    def to_dict(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else str(x)

        return {
            "assignment": list(self.assignment),
            "objective": num(self.objective),
            "feasible": self.feasible,
            "margins": [num(m) for m in self.margins],
            "numeric": self.numeric.to_dict(),
            "elapsed_seconds": self.elapsed,
        }


def _tails_from(problem: ChainProblem, mode: Mode, stop: int, report: NumericReport, counter: list[int]):
    """Yield ``(k, tails[k])`` for ``k = F-1`` down to ``stop``."""
    f = problem.num_variables
    term = problem.terminal_vector(mode)
    vec = problem.closing_vector(mode)
    report.observe(vec, mode)
    yield f - 1, vec
    for k in range(f - 1, stop, -1):
        if term is not None and term[0] == k - 1:
            vec = term[1]
        else:
            t = problem.middle_transition(k)
            vec = t.apply(vec, mode)
            counter[0] += t.nnz
        report.observe(vec, mode)
        yield k - 1, vec


def backward_sweep(problem: ChainProblem, mode: Mode | str = Mode.LOG, report: NumericReport | None = None) -> ChainCache:
    mode = Mode.parse(mode)
    f = problem.num_variables
    if f < 1:
        raise ValueError("chain has no free variable")
    report = report if report is not None else NumericReport()
    counter = [0]
    tails: list[np.ndarray] = [None] * f  # type: ignore[list-item]
    for k, vec in _tails_from(problem, mode, 0, report, counter):
        tails[k] = vec
    return ChainCache(tails=tails, mode=mode, numeric=report, multiply_adds=counter[0])


def _project(problem, m, prefix, tail, mode, report, counter) -> np.ndarray:
    psi, work = problem.project(m, prefix, tail, mode)
    counter[0] += work
    report.observe(psi, mode)
    return psi


def psi_vector(problem: ChainProblem, cache: ChainCache, m: int, prefix: Sequence[int]) -> np.ndarray:
    """Projected amplitude vector for variable ``m`` with ``prefix`` fixed.

    Entry ``x`` is the total amplitude of every feasible complete assignment
    that extends ``prefix`` with variable ``m = x``, including the factor
    contributed by the prefix itself.
    """
    if len(prefix) != m:
        raise ValueError(f"prefix must fix exactly {m} variables, got {len(prefix)}")
    psi, _ = problem.project(m, prefix, cache.tails[m], cache.mode)
    return vec_scale(psi, problem.prefix_exponent(prefix), cache.mode)


def _finish(problem, decisions, margins, report, psis, work, t0) -> Solution:
    assignment = problem.complete(decisions)
    objective, feasible = problem.evaluate(assignment)
    if not feasible:
        objective = -math.inf if problem.maximize else math.inf
    return Solution(
        assignment=assignment,
        objective=objective,
        feasible=feasible,
        numeric=report,
        margins=margins,
        elapsed=time.perf_counter() - t0,
        psi=psis,
        multiply_adds=work,
    )


def decimate(problem: ChainProblem, cache: ChainCache, record_psi: bool = False, _t0: float | None = None) -> Solution:
    """Fix the variables in order by argmax of their projected amplitudes."""
    t0 = time.perf_counter() if _t0 is None else _t0
    mode = cache.mode
    report = cache.numeric
    counter = [cache.multiply_adds]
    decisions: list[int] = []
    margins: list[float] = []
    psis = [] if record_psi else None
    for m in range(problem.num_variables):
        psi = _project(problem, m, decisions, cache.tails[m], mode, report, counter)
        if psis is not None:
            psis.append(psi)
        try:
            x, gap = argmax_with_margin(psi, mode)
        except NoFeasible:
            raise NoFeasible(f"no feasible completion when fixing variable {m} (prefix {tuple(decisions)})") from None
        decisions.append(x)
        margins.append(gap)
    return _finish(problem, decisions, margins, report, psis, counter[0], t0)


def solve_cached(problem: ChainProblem, mode: Mode | str = Mode.LOG, record_psi: bool = False) -> Solution:
    t0 = time.perf_counter()
    cache = backward_sweep(problem, mode)
    return decimate(problem, cache, record_psi=record_psi, _t0=t0)


def solve_uncached(problem: ChainProblem, mode: Mode | str = Mode.LOG, record_psi: bool = False) -> Solution:
    """Same decisions as the cached path, recontracting the tail for every variable."""
    mode = Mode.parse(mode)
    t0 = time.perf_counter()
    if problem.num_variables < 1:
        raise ValueError("chain has no free variable")
    report = NumericReport()
    counter = [0]
    decisions: list[int] = []
    margins: list[float] = []
    psis = [] if record_psi else None
    for m in range(problem.num_variables):
        tail = None
        for _, vec in _tails_from(problem, mode, m, report, counter):
            tail = vec
        psi = _project(problem, m, decisions, tail, mode, report, counter)
        if psis is not None:
            psis.append(psi)
        try:
            x, gap = argmax_with_margin(psi, mode)
        except NoFeasible:
            raise NoFeasible(f"no feasible completion when fixing variable {m} (prefix {tuple(decisions)})") from None
        decisions.append(x)
        margins.append(gap)
    return _finish(problem, decisions, margins, report, psis, counter[0], t0)


def solve_chain(problem: ChainProblem, mode: Mode | str = Mode.LOG, cached: bool = True, record_psi: bool = False) -> Solution:
    if cached:
        return solve_cached(problem, mode, record_psi=record_psi)
    return solve_uncached(problem, mode, record_psi=record_psi)
