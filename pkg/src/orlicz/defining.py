"""Strongly convex defining functions phi acting on t = log|f|.

The library works with the lower-case function phi throughout; the capital
function Phi = phi o log is reached through ``capital_eval_log``.  Every
family is stored by ln phi, since phi itself overflows almost immediately.

Below its natural floor t0 a family is continued affinely with matching
value and slope, clamped at zero, so phi is convex and nondecreasing on the
whole line and phi(-inf) = 0.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, OrliczError, RangeError
from .numerics import (
    Grid,
    LogScalar,
    Trend,
    classify_trend,
    e_tower,
    log_expm1,
    log_sum_exp,
)

__all__ = [
    "DefiningFunction",
    "ExpPow",
    "ExpLin",
    "Pow",
    "LogPow",
    "ExpLogQuotient",
    "ExpIterLog",
    "ExpExp",
    "Scaled",
    "StaircasePhi",
    "OrderVerdict",
    "eval_log",
    "invert",
    "capital_eval_log",
    "capital_invert",
    "scale_root",
    "compare_orders",
    "check_delta2",
    "check_mult_ordering",
    "build_staircase_phi",
    "staircase_domination",
]


def _as_array(t):
    scalar = np.ndim(t) == 0
    return np.asarray(t, dtype=float), scalar


def _out(arr, scalar):
    return float(arr) if scalar else arr


class DefiningFunction:
    """Base class.  Subclasses implement the core formulas on [floor, inf).

    ``_log`` gives ln phi, ``_dlog`` its derivative (used for the affine
    completion and convexity scans) and ``_inv`` the inverse of ``_log``,
    or ``None`` when no closed form exists.
    """

    family: str = ""
    floor: float = -math.inf

    def params(self) -> dict:
        raise NotImplementedError

    def render(self) -> str:
        inner = ",".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{self.family}({inner})"

    def __repr__(self) -> str:
        return self.render()

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.params() == other.params()

    def __hash__(self) -> int:
        return hash((type(self).__name__, tuple(self.params().items())))

    def _log(self, t):
        raise NotImplementedError

    def _dlog(self, t: float) -> float:
        raise NotImplementedError

    def _inv(self, y: float) -> float | None:
        return None

    # -- extended evaluation ------------------------------------------------

    def log_value(self, t):
        """ln phi(t) on the whole line (affine completion below the floor)."""
        arr, scalar = _as_array(t)
        if self.floor == -math.inf:
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                return _out(self._log(arr), scalar)
        t0 = self.floor
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            core = self._log(np.maximum(arr, t0))
            lin = 1.0 + self._floor_dlog() * (arr - t0)
            below = np.where(lin > 0, self._floor_log() + np.log(np.where(lin > 0, lin, 1.0)), -np.inf)
        return _out(np.where(arr >= t0, core, below), scalar)

    def _floor_log(self) -> float:
        return float(self._log(np.asarray(self.floor)))

    def _floor_dlog(self) -> float:
        return self._dlog(self.floor)

    def log_ratio(self, t, g):
        """ln phi(t + g) - ln phi(t); families override for cancellation."""
        return self.log_value(np.asarray(t) + g) - self.log_value(t)

    def invert_log(self, y: float) -> float:
        """The t with ln phi(t) = y (extended; y may lie below phi(floor))."""
        if y == math.inf:
            return math.inf
        if self.floor > -math.inf:
            y0 = self._floor_log()
            if y < y0:
                if y == -math.inf:
                    raise RangeError("phi vanishes on a half-line; no unique preimage of 0")
                return self.floor + math.expm1(y - y0) / self._floor_dlog()
        t = self._inv(y)
        if t is not None:
            return t
        return self._bisect(y)

    def _bisect(self, y: float) -> float:
        lo = self.floor if self.floor > -math.inf else -1.0
        step = max(1.0, abs(lo))
        while self.log_value(lo) > y:
            lo -= step
            step *= 2
        hi = max(lo + 1.0, 2.0 * abs(lo) + 1.0)
        while self.log_value(hi) < y:
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise RangeError(f"cannot bracket ln phi = {y}")
        f = lambda s: self.log_value(s) - y
        return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


# -- catalog -----------------------------------------------------------------


class ExpPow(DefiningFunction):
    """phi(t) = exp(t**alpha), 0 < alpha < 1 (the model case)."""

    family = "exp_pow"

    def __init__(self, alpha: float):
        if not 0 < alpha < 1:
            raise RangeError(f"exp_pow needs 0 < alpha < 1, got alpha={alpha}")
        self.alpha = float(alpha)
        self.floor = max(1.0, ((1 - alpha) / alpha) ** (1 / alpha))

    def params(self):
        return {"alpha": self.alpha}

    def _log(self, t):
        return t**self.alpha

    def _dlog(self, t):
        return self.alpha * t ** (self.alpha - 1)

    def _inv(self, y):
        return y ** (1 / self.alpha)

    def log_ratio(self, t, g):
        t = np.asarray(t, dtype=float)
        inside = t >= self.floor
        if np.all(inside):
            a = self.alpha
            out = t**a * np.expm1(a * np.log1p(g / t))
            return float(out) if out.ndim == 0 else out
        return super().log_ratio(t, g)


class ExpLin(DefiningFunction):
    """phi(t) = exp(p t); Phi(x) = x**p, the H^p case."""

    family = "exp_lin"

    def __init__(self, p: float):
        if p <= 0:
            raise RangeError(f"exp_lin needs p > 0, got p={p}")
        self.p = float(p)

    def params(self):
        return {"p": self.p}

    def _log(self, t):
        return self.p * t

    def _dlog(self, t):
        return self.p

    def _inv(self, y):
        return y / self.p

    def log_ratio(self, t, g):
        return self.p * np.broadcast_to(np.asarray(g, dtype=float), np.shape(t)) + 0.0 * np.asarray(t)


class Pow(DefiningFunction):
    """phi(t) = max(t, 0)**p; Phi(x) = (log+ x)**p, the big Hardy-Orlicz case."""

    family = "pow"

    def __init__(self, p: float):
        if p < 1:
            raise RangeError(f"pow needs p >= 1, got p={p}")
        self.p = float(p)

    def params(self):
        return {"p": self.p}

    def _log(self, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, self.p * np.log(np.where(t > 0, t, 1.0)), -np.inf)

    def _dlog(self, t):
        return self.p / t

    def _inv(self, y):
        return math.exp(y / self.p) if y > -math.inf else 0.0


class LogPow(DefiningFunction):
    """phi(t) = exp((ln t)**alpha), alpha > 1, for t >= e."""

    family = "log_pow"

    def __init__(self, alpha: float):
        if alpha <= 1:
            raise RangeError(f"log_pow needs alpha > 1, got alpha={alpha}")
        self.alpha = float(alpha)
        self.floor = math.e

    def params(self):
        return {"alpha": self.alpha}

    def _log(self, t):
        return np.log(t) ** self.alpha

    def _dlog(self, t):
        return self.alpha * math.log(t) ** (self.alpha - 1) / t

    def _inv(self, y):
        return math.exp(y ** (1 / self.alpha))

    def log_value_at_log(self, log_t: float) -> float:
        """ln phi at t = exp(log_t), for arguments beyond double range."""
        if log_t >= 1.0:
            return log_t**self.alpha
        return self.log_value(math.exp(log_t))


def _fd_convex_floor(logf, start: float, stop_factor: float = 1e6) -> float:
    """First point of a geometric scan after which (ln phi)'' + (ln phi)'^2 >= 0
    and (ln phi)' > 0 hold at every later scan point."""
    ts = start * 1.02 ** np.arange(int(math.log(stop_factor) / math.log(1.02)) + 1)
    ok = []
    for t in ts:
        h = 1e-4 * t
        a, b, c = logf(t - h), logf(t), logf(t + h)
        d1 = (c - a) / (2 * h)
        d2 = (c - 2 * b + a) / (h * h)
        ok.append(d1 > 0 and d2 + d1 * d1 >= 0)
    ok = np.array(ok)
    bad = np.nonzero(~ok)[0]
    if len(bad) == 0:
        return float(ts[0])
    if bad[-1] == len(ts) - 1:
        raise OrliczError("no convexity floor found in scan range")
    return float(ts[bad[-1] + 1])


def _log_j(t, j):
    out = t
    for _ in range(j):
        out = np.log(out)
    return out


class ExpIterLog(DefiningFunction):
    """phi(t) = exp(t / log_j t), j in {1, 2}, for t beyond the convexity point."""

    family = "exp_iterlog"

    def __init__(self, j: int):
        if int(j) != j or j not in (1, 2):
            raise RangeError(f"exp_iterlog needs j in {{1, 2}}, got j={j}")
        self.j = int(j)
        self.floor = _fd_convex_floor(lambda t: float(self._log(np.asarray(t))), e_tower(self.j + 1).to_float())

    def params(self):
        return {"j": self.j}

    def _log(self, t):
        return t / _log_j(t, self.j)

    def _dlog(self, t):
        h = 1e-6 * t
        return (float(self._log(np.asarray(t + h))) - float(self._log(np.asarray(t - h)))) / (2 * h)

    def _dlogj(self, t, g):
        # log_j(t+g) - log_j(t) without cancellation
        d = np.log1p(g / t)
        lt = np.log(t)
        if self.j == 1:
            return d
        return np.log1p(d / lt)

    def log_ratio(self, t, g):
        t = np.asarray(t, dtype=float)
        if np.all(t >= self.floor):
            l0 = _log_j(t, self.j)
            dl = self._dlogj(t, g)
            l1 = l0 + dl
            out = (g * l0 - t * dl) / (l0 * l1)
            return float(out) if out.ndim == 0 else out
        return super().log_ratio(t, g)


class ExpLogQuotient(DefiningFunction):
    """phi(t) = exp(delta * (t / ln t)**(alpha / (1 - alpha)))."""

    family = "exp_log_quotient"

    def __init__(self, alpha: float, delta: float):
        if not 0 < alpha < 1:
            raise RangeError(f"exp_log_quotient needs 0 < alpha < 1, got alpha={alpha}")
        if delta <= 0:
            raise RangeError(f"exp_log_quotient needs delta > 0, got delta={delta}")
        self.alpha = float(alpha)
        self.delta = float(delta)
        self.beta = self.alpha / (1 - self.alpha)
        self.floor = _fd_convex_floor(lambda t: float(self._log(np.asarray(t))), math.e**2)

    def params(self):
        return {"alpha": self.alpha, "delta": self.delta}

    def _log(self, t):
        return self.delta * (t / np.log(t)) ** self.beta

    def _dlog(self, t):
        h = 1e-6 * t
        return (float(self._log(np.asarray(t + h))) - float(self._log(np.asarray(t - h)))) / (2 * h)

    def log_ratio(self, t, g):
        t = np.asarray(t, dtype=float)
        if np.all(t >= self.floor):
            l0 = np.log(t)
            dl = np.log1p(g / t)
            q0 = t / l0
            dq = (g * l0 - t * dl) / (l0 * (l0 + dl))
            out = self.delta * q0**self.beta * np.expm1(self.beta * np.log1p(dq / q0))
            return float(out) if out.ndim == 0 else out
        return super().log_ratio(t, g)


class ExpExp(DefiningFunction):
    """phi(t) = exp(exp(alpha t)), i.e. capital Psi(x) = exp(x**alpha)."""

    family = "exp_exp"

    def __init__(self, alpha: float):
        if alpha <= 0:
            raise RangeError(f"exp_exp needs alpha > 0, got alpha={alpha}")
        self.alpha = float(alpha)

    def params(self):
        return {"alpha": self.alpha}

    def _log(self, t):
        return np.exp(self.alpha * t)

    def _dlog(self, t):
        return self.alpha * math.exp(self.alpha * t)

    def _inv(self, y):
        if y <= 0:
            raise RangeError(f"exp_exp takes values > 1; ln phi = {y} is out of range")
        return math.log(y) / self.alpha


class Scaled(DefiningFunction):
    """t -> inner(factor * t)."""

    family = "scaled"

    def __init__(self, inner: DefiningFunction, factor: float):
        if factor <= 0:
            raise RangeError("scale factor must be positive")
        self.inner = inner
        self.factor = float(factor)
        self.floor = inner.floor / self.factor

    def params(self):
        return {"inner": self.inner.render(), "factor": self.factor}

    def log_value(self, t):
        return self.inner.log_value(np.asarray(t, dtype=float) * self.factor if np.ndim(t) else float(t) * self.factor)

    def _log(self, t):
        return self.inner.log_value(t * self.factor)

    def _dlog(self, t):
        return self.factor * self.inner._dlog(t * self.factor)

    def invert_log(self, y):
        return self.inner.invert_log(y) / self.factor

    def log_ratio(self, t, g):
        return self.inner.log_ratio(np.asarray(t) * self.factor, g * self.factor)


# -- staircase ----------------------------------------------------------------


class StaircasePhi(DefiningFunction):
    """Piecewise-affine convex phi with slope phi(t_n) on [t_n, t_{n+1}).

    Breakpoints are kept as ln t_n because t_n leaves double range after a
    few dozen levels.  ``breakpoints`` holds the float t_n where
    representable and inf beyond.
    """

    family = "staircase"

    def __init__(self, log_breakpoints: Sequence[float], log_values: Sequence[float], gamma_exp: float | None = None):
        self.log_breakpoints = np.asarray(log_breakpoints, dtype=float)
        self.log_values = np.asarray(log_values, dtype=float)
        if self.log_breakpoints.shape != self.log_values.shape or len(self.log_values) < 1:
            raise ValueError("breakpoints and values must be nonempty and equally long")
        if np.any(np.diff(self.log_breakpoints) <= 0) or np.any(np.diff(self.log_values) <= 0):
            raise ValueError("staircase breakpoints and values must increase")
        self.gamma_exp = gamma_exp
        with np.errstate(over="ignore"):
            self.breakpoints = np.exp(self.log_breakpoints)
        self.floor = float(self.breakpoints[0])

    def params(self):
        if self.gamma_exp is not None:
            return {"gamma": self.gamma_exp, "n": len(self.log_values)}
        return {"n": len(self.log_values)}

    def render(self):
        if self.gamma_exp is None:
            raise OrliczError("file-backed staircase has no inline spec; serialize with to_json")
        return f"staircase(gamma={self.gamma_exp!r},n={len(self.log_values)})"

    def __eq__(self, other):
        return (
            isinstance(other, StaircasePhi)
            and np.array_equal(self.log_breakpoints, other.log_breakpoints)
            and np.array_equal(self.log_values, other.log_values)
        )

    def __hash__(self):
        return hash((len(self.log_values), float(self.log_values[-1])))

    def __len__(self):
        return len(self.log_values)

    def _floor_log(self):
        return float(self.log_values[0])

    def _floor_dlog(self):
        # slope phi(t_1) divided by phi(t_1)
        return 1.0

    def _dlog(self, t):
        return 1.0

    def _log(self, t):
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        idx = np.clip(idx, 0, len(self.breakpoints) - 1)
        return self.log_values[idx] + np.log1p(t - self.breakpoints[idx])

    def log_value_at_log(self, log_t: float) -> float:
        """ln phi(exp(log_t)); usable far beyond double range."""
        if log_t < 700:
            return float(self.log_value(math.exp(log_t)))
        n = int(np.searchsorted(self.log_breakpoints, log_t, side="right") - 1)
        lb = self.log_breakpoints[n]
        if log_t == lb:
            return float(self.log_values[n])
        log_gap = log_t + math.log1p(-math.exp(lb - log_t))
        return float(self.log_values[n] + np.logaddexp(0.0, log_gap))

    def _inv(self, y):
        n = int(np.searchsorted(self.log_values, y, side="right") - 1)
        tn = self.breakpoints[n]
        if not math.isfinite(tn):
            raise RangeError("preimage lies beyond double range; use invert_log_to_log")
        return float(tn + math.expm1(y - self.log_values[n]))

    def invert_log_to_log(self, y: float) -> float:
        """ln t for ln phi(t) = y."""
        n = int(np.searchsorted(self.log_values, y, side="right") - 1)
        if n < 0:
            return math.log(self.invert_log(y))
        gap = y - self.log_values[n]
        if gap == 0:
            return float(self.log_breakpoints[n])
        return float(np.logaddexp(self.log_breakpoints[n], log_expm1(gap)))

    def slopes_log(self) -> np.ndarray:
        """ln of the slope on each [t_n, t_{n+1}); equals ln phi(t_n)."""
        return self.log_values.copy()

    def to_json(self) -> str:
        bps = [float(b) if math.isfinite(b) else None for b in self.breakpoints]
        return json.dumps(
            {
                "breakpoints": bps,
                "log_breakpoints": [float(x) for x in self.log_breakpoints],
                "log_values": [float(x) for x in self.log_values],
                "gamma_exp": self.gamma_exp,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "StaircasePhi":
        data = json.loads(text)
        if "log_breakpoints" in data:
            lb = data["log_breakpoints"]
        else:
            lb = [math.log(b) for b in data["breakpoints"]]
        return cls(lb, data["log_values"], data.get("gamma_exp"))


def build_staircase_phi(gamma_exp: float, n_max: int) -> StaircasePhi:
    """Breakpoints t_1 = 1, t_{n+1} = t_n + e^{n^gamma} - 1 with phi(t_1) = 1.

    Then phi(t_{n+1}) = phi(t_n) * e^{n^gamma}, so ln phi(t_n) is the exact
    partial sum of k^gamma for k < n.
    """
    if gamma_exp <= 0:
        raise RangeError("gamma_exp must be positive")
    if n_max < 1:
        raise RangeError("n_max must be positive")
    log_t = [0.0]
    t_float = 1.0
    increments = [k**gamma_exp for k in range(1, n_max)]
    for k, inc in enumerate(increments, start=1):
        if math.isfinite(t_float) and inc < 700:
            t_float = t_float + math.expm1(inc)
            if not math.isfinite(t_float):
                log_t.append(float(np.logaddexp(log_t[-1], log_expm1(inc))))
                continue
            log_t.append(math.log(t_float))
        else:
            t_float = math.inf
            log_t.append(float(np.logaddexp(log_t[-1], log_expm1(inc))))
    # exact partial sums, each independently rounded
    log_values = [0.0]
    for n in range(2, n_max + 1):
        log_values.append(math.fsum(increments[: n - 1]))
    if not all(math.isfinite(x) for x in log_t):
        raise OverflowError("staircase breakpoints exceed LogScalar range")
    return StaircasePhi(log_t, log_values, gamma_exp)


def staircase_domination(phi: StaircasePhi, beta: float) -> dict:
    """Compare ln log_pow(beta)(t_{n-1}) with ln phi(t_n) for every level.

    Returns the margins and n0, the smallest level from which the margin
    stays positive up to the last breakpoint (None when it never does).
    """
    ref = LogPow(beta)
    margins = []
    for n in range(2, len(phi) + 1):
        left = ref.log_value_at_log(float(phi.log_breakpoints[n - 2]))
        margins.append(left - float(phi.log_values[n - 1]))
    n0 = None
    for i in range(len(margins) - 1, -1, -1):
        if margins[i] > 0:
            n0 = i + 2
        else:
            break
    return {"beta": beta, "n0": n0, "margins": margins}


# -- operations ---------------------------------------------------------------


def eval_log(phi: DefiningFunction, t: float, strict: bool = True) -> LogScalar:
    """ln phi(t) as a LogScalar; strict mode rejects t below the floor."""
    if strict and t < phi.floor:
        raise DomainError(f"t={t} is below the floor {phi.floor} of {phi.render() if not isinstance(phi, StaircasePhi) else 'staircase'}")
    return LogScalar(float(phi.log_value(t)))


def invert(phi: DefiningFunction, y: LogScalar, strict: bool = True) -> float:
    if strict and phi.floor > -math.inf:
        y0 = float(phi.log_value(phi.floor))
        if y.log_value < y0:
            raise RangeError(f"ln phi = {y.log_value} is below phi(floor) (ln = {y0})")
    return float(phi.invert_log(y.log_value))


def capital_eval_log(phi: DefiningFunction, x: LogScalar, strict: bool = True) -> LogScalar:
    """ln Phi(x) = ln phi(ln x)."""
    return eval_log(phi, x.log_value, strict=strict)


def capital_invert(phi: DefiningFunction, y: LogScalar) -> LogScalar:
    """Phi^{-1}(y) as a LogScalar (its log is phi^{-1}(y))."""
    return LogScalar(float(phi.invert_log(y.log_value)))


def scale_root(psi: DefiningFunction, n: int) -> DefiningFunction:
    """psi_n(t) = psi(t / n), so that Psi_n(x) = Psi(x**(1/n))."""
    if n < 1 or int(n) != n:
        raise RangeError("n must be a positive integer")
    if n == 1:
        return psi
    if isinstance(psi, ExpLin):
        return ExpLin(psi.p / n)
    if isinstance(psi, Scaled):
        return Scaled(psi.inner, psi.factor / n)
    return Scaled(psi, 1.0 / n)


@dataclass
class OrderVerdict:
    sup_ratio_observed: LogScalar
    trend: Trend
    implied_inclusion: str
    samples: list = field(default_factory=list)
    hypothesis_holds: bool | None = None
    note: str = "heuristic: limsup judged from the top decade of a finite grid"

    def __post_init__(self):
        if self.trend is Trend.BOUNDED and not self.sup_ratio_observed.is_finite():
            raise ValueError("a bounded verdict needs a finite observed sup")

    def to_dict(self) -> dict:
        return {
            "sup_log_ratio_observed": self.sup_ratio_observed.log_value,
            "trend": self.trend.value,
            "implied_inclusion": self.implied_inclusion,
            "hypothesis_holds": self.hypothesis_holds,
            "note": self.note,
            "samples": [list(s) for s in self.samples],
        }


def describe(phi):
    try:
        return phi.render()
    except OrliczError:
        return phi.family


def compare_orders(phi1: DefiningFunction, phi2: DefiningFunction, grid: Grid) -> OrderVerdict:
    """Bracket limsup phi1/phi2 along ``grid`` (points are t = log x)."""
    ts = grid.array()
    lr = np.asarray(phi1.log_value(ts), dtype=float) - np.asarray(phi2.log_value(ts), dtype=float)
    lr = np.where(np.isnan(lr), 0.0, lr)
    trend = classify_trend(ts, lr)
    a, b = describe(phi1), describe(phi2)
    if trend is Trend.BOUNDED:
        text = f"limsup Phi1/Phi2 < inf, so L[{b}] is contained in L[{a}]"
    elif trend is Trend.UNBOUNDED:
        text = f"limsup Phi1/Phi2 = inf, so L[{b}] is not contained in L[{a}]"
    else:
        text = "undecided on this grid"
    return OrderVerdict(LogScalar(float(np.max(lr))), trend, text, list(zip(ts.tolist(), lr.tolist())))


def check_delta2(phi: DefiningFunction, grid: Grid) -> OrderVerdict:
    """sup Phi(2s)/Phi(s) over grid points s > 0 (capital variable)."""
    s = grid.array()
    ts = np.log(s)
    lr = np.asarray(phi.log_ratio(ts, math.log(2.0)), dtype=float)
    trend = classify_trend(s, lr)
    if trend is Trend.BOUNDED:
        text = "Phi(2s) <= M Phi(s) on the grid tail: Delta_2 evidence"
    elif trend is Trend.UNBOUNDED:
        text = "Phi(2s)/Phi(s) grows on the grid tail: Delta_2 fails"
    else:
        text = "undecided on this grid"
    return OrderVerdict(LogScalar(float(np.max(lr))), trend, text, list(zip(s.tolist(), lr.tolist())))


def check_mult_ordering(phi1: DefiningFunction, phi2: DefiningFunction, grid: Grid, tol: float = 1e-10) -> OrderVerdict:
    """Is h = phi2^{-1} - phi1^{-1} nondecreasing?  Grid points are ln y."""
    ys = grid.array()
    h = np.array([phi2.invert_log(float(y)) - phi1.invert_log(float(y)) for y in ys])
    d = np.diff(h)
    scale = np.maximum(1.0, np.abs(h[1:]))
    holds = bool(np.all(d >= -tol * scale))
    text = (
        f"h nondecreasing: Mult ordering inherited, Mult(H[{describe(phi1)}]) inside Mult(H[{describe(phi2)}])"
        if holds
        else "h decreases somewhere on the grid: hypothesis not verified"
    )
    return OrderVerdict(
        LogScalar.zero(),
        Trend.BOUNDED if holds else Trend.INCONCLUSIVE,
        text,
        list(zip(ys.tolist(), h.tolist())),
        hypothesis_holds=holds,
        note="checked on grid points only",
    )
