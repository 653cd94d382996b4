"""Amplitude arithmetic in a linear or a log-stabilized number domain.

Chain contractions multiply and sum terms of the form ``exp(±tau * cost)``.
In :attr:`Mode.LINEAR` the amplitudes are held directly as floats, which is
exact but overflows once ``tau * cost`` exceeds roughly 709.  In
:attr:`Mode.LOG` the natural logarithm is held instead and sums are done with
the max-factored log-sum-exp, so the representable ``tau`` range is limited
only by the resolution of the log values themselves.  The zero amplitude is
``-inf`` in log mode, which makes absorption exact.

The scalar :class:`Amplitude` API is used by tests and small computations; the
engine works on whole numpy vectors through the ``vec_*`` helpers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ModeMismatch, NoFeasible

# Beyond ~2**52 consecutive log values are more than 1 apart.
DEFAULT_LOG_CEILING = 1e15


class Mode(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"

    @classmethod
    def parse(cls, mode: "Mode | str") -> "Mode":
        if isinstance(mode, Mode):
            return mode
        aliases = {"linear": cls.LINEAR, "lin": cls.LINEAR, "log": cls.LOG, "logstabilized": cls.LOG}
        try:
            return aliases[str(mode).lower()]
        except KeyError:
            raise ValueError(f"unknown numeric mode {mode!r}; expected 'linear' or 'log'") from None


@dataclass(frozen=True)
class Amplitude:
    """A single non-negative amplitude.

    ``value`` is the amplitude itself in linear mode and its natural log in
    log mode (``-inf`` for zero).
    """

    mode: Mode
    value: float

    @property
    def is_zero(self) -> bool:
        return self.value == 0.0 if self.mode is Mode.LINEAR else self.value == -math.inf

    def log_value(self) -> float:
        if self.mode is Mode.LOG:
            return self.value
        if self.value == 0.0:
            return -math.inf
        return math.log(self.value)

    def __lt__(self, other: "Amplitude") -> bool:
        _check_modes(self, other)
        return self.value < other.value

    def __le__(self, other: "Amplitude") -> bool:
        _check_modes(self, other)
        return self.value <= other.value


def _check_modes(a: Amplitude, b: Amplitude) -> None:
    if a.mode is not b.mode:
        raise ModeMismatch(f"cannot combine {a.mode.value} and {b.mode.value} amplitudes")


def zero(mode: Mode | str) -> Amplitude:
    mode = Mode.parse(mode)
    return Amplitude(mode, 0.0 if mode is Mode.LINEAR else -math.inf)


def amp_from_exponent(x: float, mode: Mode | str) -> Amplitude:
    """Amplitude representing ``exp(x)``; ``x = -inf`` gives the zero amplitude."""
    mode = Mode.parse(mode)
    if math.isnan(x) or x == math.inf:
        raise ValueError(f"exponent must be finite or -inf, got {x}")
    if mode is Mode.LOG:
        return Amplitude(mode, float(x))
    if x == -math.inf:
        return Amplitude(mode, 0.0)
    try:
        return Amplitude(mode, math.exp(x))
    except OverflowError:
        return Amplitude(mode, math.inf)


def amp_mul(a: Amplitude, b: Amplitude) -> Amplitude:
    _check_modes(a, b)
    if a.is_zero or b.is_zero:
        return zero(a.mode)
    if a.mode is Mode.LOG:
        return Amplitude(a.mode, a.value + b.value)
    return Amplitude(a.mode, a.value * b.value)


def amp_add(a: Amplitude, b: Amplitude) -> Amplitude:
    _check_modes(a, b)
    if a.mode is Mode.LINEAR:
        return Amplitude(a.mode, a.value + b.value)
    hi, lo = (a.value, b.value) if a.value >= b.value else (b.value, a.value)
    if hi == -math.inf:
        return a
    return Amplitude(a.mode, hi + math.log1p(math.exp(lo - hi)))


def argmax_amplitudes(v: Sequence[Amplitude]) -> int:
    """Index of the largest amplitude, lowest index on ties."""
    if len(v) == 0:
        raise ValueError("argmax of an empty amplitude sequence")
    best = 0
    for i in range(1, len(v)):
        if v[best] < v[i]:
            best = i
    if v[best].is_zero:
        raise NoFeasible("every amplitude is zero")
    return best


# -- vector helpers -------------------------------------------------------


def vec_from_exponents(x: np.ndarray, mode: Mode) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if mode is Mode.LOG:
        return x.copy()
    with np.errstate(over="ignore"):
        return np.exp(x)


def vec_ones(size: int, mode: Mode) -> np.ndarray:
    return np.full(size, 1.0 if mode is Mode.LINEAR else 0.0)


def vec_zeros(size: int, mode: Mode) -> np.ndarray:
    return np.full(size, 0.0 if mode is Mode.LINEAR else -np.inf)


def vec_log(v: np.ndarray, mode: Mode) -> np.ndarray:
    """Log amplitudes of ``v`` (``-inf`` for zeros) regardless of mode."""
    if mode is Mode.LOG:
        return v
    with np.errstate(divide="ignore"):
        return np.log(v)


def vec_scale(v: np.ndarray, exponent: float, mode: Mode) -> np.ndarray:
    """Multiply every entry by ``exp(exponent)``."""
    if mode is Mode.LOG:
        return v + exponent
    with np.errstate(over="ignore", invalid="ignore"):
        out = v * np.exp(exponent)
    out[v == 0.0] = 0.0
    return out


def vec_is_zero(v: np.ndarray, mode: Mode) -> np.ndarray:
    return v == 0.0 if mode is Mode.LINEAR else v == -np.inf


def argmax_with_margin(v: np.ndarray, mode: Mode) -> tuple[int, float]:
    """Lowest-index argmax of an amplitude vector plus the log-gap to the runner-up.

    The margin is ``inf`` when there is no non-zero runner-up.  NaN entries
    (which only appear after a linear-mode overflow) are treated as zero.
    """
    if v.size == 0:
        raise ValueError("argmax of an empty amplitude vector")
    if v.size <= 16:
        return _argmax_short(vec_log(v, mode).tolist())
    logs = np.array(vec_log(v, mode), dtype=float)
    logs[np.isnan(logs)] = -np.inf
    best = int(np.argmax(logs))
    top = logs[best]
    if top == -np.inf:
        raise NoFeasible("projected amplitude vector is all zero")
    if logs.size == 1:
        return best, math.inf
    rest = np.delete(logs, best)
    second = rest.max()
    if second == -np.inf:
        return best, math.inf
    if top == np.inf:
        return best, 0.0 if second == np.inf else math.inf
    return best, float(top - second)


def _argmax_short(logs: list[float]) -> tuple[int, float]:
    best, top, second = -1, -math.inf, -math.inf
    for i, x in enumerate(logs):
        if x != x:  # NaN counts as zero
            continue
        if x > top or best < 0:
            best, top, second = i, x, top if best >= 0 else second
        elif x > second:
            second = x
    if best < 0 or top == -math.inf:
        raise NoFeasible("projected amplitude vector is all zero")
    if second == -math.inf:
        return best, math.inf
    if top == math.inf:
        return best, 0.0 if second == math.inf else math.inf
    return best, float(top - second)


@dataclass
class NumericReport:
    """Running saturation diagnostics for one contraction."""

    saturated: bool = False
    max_log_magnitude: float = 0.0
    nonfinite_count: int = 0
    log_ceiling: float = DEFAULT_LOG_CEILING

    def observe(self, v: np.ndarray, mode: Mode) -> None:
        if mode is Mode.LINEAR:
            bad = ~np.isfinite(v)
            nbad = int(np.count_nonzero(bad))
            if nbad:
                self.nonfinite_count += nbad
                self.saturated = True
            good = v[~bad & (v > 0.0)]
            if good.size:
                mag = float(np.abs(np.log(good)).max())
                self.max_log_magnitude = max(self.max_log_magnitude, mag)
        elif v.size:
            hi = float(v.max())
            if math.isnan(hi) or hi == math.inf:
                self.nonfinite_count += int(np.count_nonzero(np.isnan(v) | (v == np.inf)))
                self.saturated = True
                good = v[np.isfinite(v)]
                if good.size:
                    self.max_log_magnitude = max(self.max_log_magnitude, float(np.abs(good).max()))
            elif hi > -math.inf:
                lo = float(v.min())
                if lo == -math.inf:
                    lo = float(v[v > -math.inf].min())
                self.max_log_magnitude = max(self.max_log_magnitude, abs(hi), abs(lo))
        if self.max_log_magnitude > self.log_ceiling:
            self.saturated = True

    def to_dict(self) -> dict:
        return {
            "saturated": self.saturated,
            "max_log_magnitude": self.max_log_magnitude,
            "nonfinite_count": self.nonfinite_count,
        }
