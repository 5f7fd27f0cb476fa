"""Extreme-range scalars, series certificates and sampling grids.

Magnitudes such as phi(t) for t ~ 1e12 or arc measures like exp(-2e6)
do not fit in a double, so everything positive is carried by its natural
logarithm (``LogScalar``).  Iterated exponentials e_k = exp(e_{k-1}) are
carried by ``TowerScalar``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Sequence

import numpy as np

E = math.e
MAX_TOWER_LEVEL = 8

__all__ = [
    "LogScalar",
    "TowerScalar",
    "SeriesKind",
    "SeriesVerdict",
    "Grid",
    "Trend",
    "log_sum_exp",
    "log_diff_exp",
    "log_expm1",
    "tower_compare",
    "iterated",
    "e_tower",
    "classify_trend",
    "basel_certificate",
    "harmonic_certificate",
]


@total_ordering
@dataclass(frozen=True)
class LogScalar:
    """A nonnegative extended real stored as ``log_value`` (-inf is zero)."""

    log_value: float

    @classmethod
    def from_value(cls, x: float) -> "LogScalar":
        if x < 0:
            raise ValueError(f"LogScalar holds nonnegative values, got {x}")
        return cls(math.log(x) if x > 0 else -math.inf)

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(-math.inf)

    @classmethod
    def infinity(cls) -> "LogScalar":
        return cls(math.inf)

    @property
    def value(self) -> float:
        """The represented number as a float (may overflow to inf)."""
        if self.log_value > 709.78:
            return math.inf
        return math.exp(self.log_value)

    def is_zero(self) -> bool:
        return self.log_value == -math.inf

    def is_finite(self) -> bool:
        return self.log_value < math.inf

    def __mul__(self, other: "LogScalar") -> "LogScalar":
        if self.is_zero() or other.is_zero():
            return LogScalar.zero()
        return LogScalar(self.log_value + other.log_value)

    def __truediv__(self, other: "LogScalar") -> "LogScalar":
        if other.is_zero():
            raise ZeroDivisionError("division by LogScalar zero")
        if self.is_zero():
            return self
        return LogScalar(self.log_value - other.log_value)

    def __add__(self, other: "LogScalar") -> "LogScalar":
        return log_sum_exp([self, other])

    def __lt__(self, other: "LogScalar") -> bool:
        return self.log_value < other.log_value

    def __repr__(self) -> str:
        return f"LogScalar(log_value={self.log_value!r})"


def log_sum_exp(terms: Iterable[LogScalar | float]) -> LogScalar:
    """Log of the sum of the represented values, with the max shifted out.

    Accepts ``LogScalar`` items or raw log-values.  The shifted exponentials
    are added with ``math.fsum``, so the result does not depend on the order
    of ``terms``.
    """
    logs = [t.log_value if isinstance(t, LogScalar) else float(t) for t in terms]
    if not logs:
        return LogScalar.zero()
    top = max(logs)
    if top == -math.inf:
        return LogScalar.zero()
    if top == math.inf:
        return LogScalar.infinity()
    total = math.fsum(math.exp(v - top) for v in logs)
    return LogScalar(top + math.log(total))


def log_diff_exp(a: float, b: float) -> float:
    """log(exp(a) - exp(b)) for a >= b."""
    if b > a:
        raise ValueError("log_diff_exp needs a >= b")
    if b == -math.inf:
        return a
    if a == b:
        return -math.inf
    return a + math.log(-math.expm1(b - a))


def log_expm1(a: float) -> float:
    """log(exp(a) - 1) for a > 0, stable for tiny and huge a."""
    if a <= 0:
        raise ValueError("log_expm1 needs a > 0")
    if a > 50:
        return a + math.log1p(-math.exp(-a))
    return math.log(math.expm1(a))


@dataclass(frozen=True)
class TowerScalar:
    """exp applied ``level`` times to ``mantissa_log``.

    Normalized form: level 0 holds values below e (any real); for level >= 1
    the mantissa lies in [1, e).  In normalized form ordering is the
    lexicographic order of (level, mantissa_log).
    """

    level: int
    mantissa_log: float

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("tower level must be nonnegative")
        if self.level > MAX_TOWER_LEVEL:
            raise OverflowError(f"tower level {self.level} exceeds {MAX_TOWER_LEVEL}")

    @classmethod
    def from_float(cls, x: float) -> "TowerScalar":
        return cls(0, float(x)).normalized()

    def normalized(self) -> "TowerScalar":
        level, m = self.level, self.mantissa_log
        while level >= 1 and m < 1.0:
            m = math.exp(m)
            level -= 1
        while m >= E:
            m = math.log(m)
            level += 1
        return TowerScalar(level, m)

    def to_float(self) -> float:
        """Evaluate as a float; inf when the value exceeds double range."""
        x = self.mantissa_log
        for _ in range(self.level):
            if x > 709.78:
                return math.inf
            x = math.exp(x)
        return x

    def log(self) -> "TowerScalar":
        t = self.normalized()
        if t.level == 0:
            if t.mantissa_log <= 0:
                raise ValueError(f"log of nonpositive value {t.mantissa_log}")
            return TowerScalar(0, math.log(t.mantissa_log)).normalized()
        return TowerScalar(t.level - 1, t.mantissa_log).normalized()

    def exp(self) -> "TowerScalar":
        t = self.normalized()
        if t.level == 0 and t.mantissa_log < 1.0:
            return TowerScalar(0, math.exp(t.mantissa_log)).normalized()
        return TowerScalar(t.level + 1, t.mantissa_log).normalized()

    def shift(self, c: float) -> "TowerScalar":
        """The tower for value + c (value must stay positive when level >= 1)."""
        t = self.normalized()
        x = t.to_float()
        if math.isfinite(x):
            return TowerScalar.from_float(x + c)
        # value = exp(inner); value + c = exp(inner + log1p(c / value)), and
        # c / value underflows to zero here.
        return t

    def scale(self, c: float) -> "TowerScalar":
        """The tower for c * value, c > 0."""
        if c <= 0:
            raise ValueError("scale factor must be positive")
        t = self.normalized()
        x = t.to_float()
        if math.isfinite(x) and math.isfinite(x * c):
            return TowerScalar.from_float(x * c)
        inner = TowerScalar(t.level - 1, t.mantissa_log).shift(math.log(c))
        return inner.exp()

    def _key(self):
        t = self.normalized()
        return (t.level, t.mantissa_log)

    def __lt__(self, other: "TowerScalar") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "TowerScalar") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "TowerScalar") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "TowerScalar") -> bool:
        return self._key() >= other._key()


def e_tower(k: int) -> TowerScalar:
    """e_k with e_0 = 1, e_1 = e, e_{k+1} = exp(e_k)."""
    if k == 0:
        return TowerScalar(0, 1.0)
    return TowerScalar(k, 1.0)


def tower_compare(a: TowerScalar, b: TowerScalar) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    ka, kb = a._key(), b._key()
    return (ka > kb) - (ka < kb)


def iterated(k: int, direction: str, x: TowerScalar | float) -> TowerScalar:
    """Apply log or exp ``k`` times with level bookkeeping."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if direction not in ("log", "exp"):
        raise ValueError(f"direction must be 'log' or 'exp', got {direction!r}")
    t = x if isinstance(x, TowerScalar) else TowerScalar.from_float(x)
    for _ in range(k):
        t = t.log() if direction == "log" else t.exp()
    return t


class SeriesKind(str, enum.Enum):
    CONVERGENT = "ConvergentWithTailBound"
    DIVERGENT = "DivergentWithLowerBound"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SeriesVerdict:
    kind: SeriesKind
    partial_sum: float
    certificate: str
    tail_bound: float | None = None
    lower_bound: float | None = None
    truncation: int | None = None

    def __post_init__(self):
        if self.kind is SeriesKind.CONVERGENT and self.tail_bound is None:
            raise ValueError("a convergent verdict needs a tail bound")
        if self.kind is SeriesKind.DIVERGENT and self.lower_bound is None:
            raise ValueError("a divergent verdict needs a lower bound")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "partial_sum": self.partial_sum,
            "certificate": self.certificate,
            "tail_bound": self.tail_bound,
            "lower_bound": self.lower_bound,
            "truncation": self.truncation,
        }


def basel_certificate(n: int) -> SeriesVerdict:
    """sum_{k<=n} 1/k^2 with the integral tail bound 1/n."""
    partial = math.fsum(1.0 / (k * k) for k in range(1, n + 1))
    return SeriesVerdict(
        SeriesKind.CONVERGENT,
        partial,
        "comparison with sum 1/k^2; tail sum_{k>N} 1/k^2 <= int_N^inf x^-2 dx = 1/N",
        tail_bound=1.0 / n,
        truncation=n,
    )


def harmonic_certificate(n: int) -> SeriesVerdict:
    """sum_{k<=n} 1/k, bounded below by log(n+1) which is unbounded in n."""
    partial = math.fsum(1.0 / k for k in range(1, n + 1))
    return SeriesVerdict(
        SeriesKind.DIVERGENT,
        partial,
        "comparison with sum 1/k >= log(N+1) -> inf",
        lower_bound=partial,
        truncation=n,
    )


class Trend(str, enum.Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    INCONCLUSIVE = "inconclusive"


# Heuristic constants for deciding a limsup from a finite sample.  They are
# echoed into every report that uses them.
GROWTH_FACTOR = 10.0
DECAY_RATIO = 0.5


def classify_trend(xs: Sequence[float], log_ys: Sequence[float]) -> Trend:
    """Guess whether exp(log_ys) stays bounded as xs grows.

    The top decade of ``xs`` decides.  Nonincreasing there: bounded.
    Strictly increasing with total growth over the whole sample above
    ``GROWTH_FACTOR`` and no geometric slowdown: unbounded.  Increasing
    but with decade increments shrinking by ``DECAY_RATIO``: bounded
    (convergent).  Anything else is inconclusive.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(log_ys, dtype=float)
    if len(xs) < 3:
        return Trend.INCONCLUSIVE
    if not np.all(np.isfinite(ys)):
        return Trend.UNBOUNDED if ys[-1] == math.inf else Trend.INCONCLUSIVE
    top = xs >= xs[-1] / 10.0
    if top.sum() < 2:
        top[-2:] = True
    y_top = ys[top]
    tol = 1e-12 * max(1.0, float(np.max(np.abs(y_top))))
    d = np.diff(y_top)
    if np.all(d <= tol):
        return Trend.BOUNDED
    rise_top = y_top[-1] - y_top[0]
    prev = (xs >= xs[-1] / 100.0) & ~top
    rise_prev = None
    if prev.sum() >= 1:
        idx_prev = np.nonzero(prev)[0][0]
        rise_prev = ys[np.nonzero(top)[0][0]] - ys[idx_prev]
    if rise_prev is not None and rise_prev > 0 and rise_top <= DECAY_RATIO * rise_prev:
        return Trend.BOUNDED
    if np.all(d > 0) and ys[-1] - ys[0] > math.log(GROWTH_FACTOR):
        return Trend.UNBOUNDED
    return Trend.INCONCLUSIVE


@dataclass(frozen=True)
class Grid:
    """Strictly increasing sample points."""

    points: tuple
    scale: str = "linear"

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("grid must be nonempty")
        if self.scale not in ("linear", "geometric", "tower"):
            raise ValueError(f"unknown grid scale {self.scale!r}")
        for a, b in zip(self.points, self.points[1:]):
            if not a < b:
                raise ValueError("grid points must be strictly increasing")

    @classmethod
    def linear(cls, start: float, stop: float, n: int) -> "Grid":
        return cls(tuple(float(x) for x in np.linspace(start, stop, n)), "linear")

    @classmethod
    def geometric(cls, start: float, stop: float, n: int) -> "Grid":
        if start <= 0:
            raise ValueError("geometric grid needs a positive start")
        pts = np.geomspace(start, stop, n)
        pts[0], pts[-1] = start, stop
        return cls(tuple(float(x) for x in pts), "geometric")

    @classmethod
    def tower(cls, levels: Sequence[int]) -> "Grid":
        return cls(tuple(e_tower(k) for k in levels), "tower")

    def array(self) -> np.ndarray:
        if self.scale == "tower":
            return np.array([p.to_float() for p in self.points])
        return np.asarray(self.points, dtype=float)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)
