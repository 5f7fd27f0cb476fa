"""Admissible gauges gamma, the two growth-condition checkers, and psi = phi o gamma^{-1}."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .defining import DefiningFunction, describe
from .errors import GapError, RangeError
from .numerics import (
    GROWTH_FACTOR,
    Grid,
    SeriesKind,
    SeriesVerdict,
    Trend,
    classify_trend,
    e_tower,
)

__all__ = [
    "GammaFunction",
    "Power",
    "LogWeighted",
    "IterLog",
    "SqrtEps",
    "PiecewiseConcave",
    "Verdict",
    "AdmissibilityReport",
    "ComposedPsi",
    "check_tilde_delta",
    "check_tilde_nabla",
    "optimal_power_gamma",
    "dyadic_levels",
    "dyadic_gamma",
    "compose_psi",
    "check_gap_divergence",
    "eps_tower_slope",
]


class GammaFunction:
    """Concave, increasing, unbounded gauge on [floor, inf)."""

    family = ""
    floor = 0.0

    def params(self) -> dict:
        raise NotImplementedError

    def render(self) -> str:
        inner = ",".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{self.family}({inner})"

    def __repr__(self):
        return self.render()

    def __eq__(self, other):
        return type(self) is type(other) and self.params() == other.params()

    def __hash__(self):
        return hash((type(self).__name__, tuple(self.params().items())))

    def value(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)

    def derivative(self, t: float) -> float:
        h = 1e-6 * max(1.0, abs(t))
        lo = max(t - h, self.floor)
        return (float(self.value(t + h)) - float(self.value(lo))) / (t + h - lo)

    def inverse(self, y: float) -> float:
        """Bisection with bracket doubling, relative tolerance 1e-10 or better."""
        y0 = float(self.value(self.floor))
        if y < y0:
            raise RangeError(f"{self.render()} never takes the value {y}")
        lo, hi = self.floor, max(2 * self.floor, self.floor + 1.0)
        while float(self.value(hi)) < y:
            lo, hi = hi, 2 * hi
            if hi > 1e300:
                raise RangeError(f"cannot bracket gamma^-1({y})")
        return brentq(lambda s: float(self.value(s)) - y, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)

    def inverse_array(self, ys):
        ys = np.asarray(ys, dtype=float)
        return np.vectorize(self.inverse, otypes=[float])(ys)


class Power(GammaFunction):
    """C t**p with 0 < p <= 1."""

    family = "power"

    def __init__(self, C: float, p: float):
        if C <= 0:
            raise RangeError(f"power needs C > 0, got C={C}")
        if not 0 < p <= 1:
            raise RangeError(f"power needs 0 < p <= 1, got p={p}")
        self.C = float(C)
        self.p = float(p)

    def params(self):
        return {"C": self.C, "p": self.p}

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = self.C * np.maximum(t, 0.0) ** self.p
        return float(out) if out.ndim == 0 else out

    def derivative(self, t):
        return self.C * self.p * t ** (self.p - 1)

    def inverse(self, y):
        if y < 0:
            raise RangeError(f"power gauge is nonnegative; got {y}")
        return (y / self.C) ** (1 / self.p)

    def inverse_array(self, ys):
        ys = np.asarray(ys, dtype=float)
        return (np.maximum(ys, 0.0) / self.C) ** (1 / self.p)


class LogWeighted(GammaFunction):
    """(1 + eta) s**(1 - alpha) ln s, concave past its inflection."""

    family = "log_weighted"

    def __init__(self, alpha: float, eta: float):
        if not 0 < alpha < 1:
            raise RangeError(f"log_weighted needs 0 < alpha < 1, got alpha={alpha}")
        if eta < 0:
            raise RangeError(f"log_weighted needs eta >= 0, got eta={eta}")
        self.alpha = float(alpha)
        self.eta = float(eta)
        b = 1 - self.alpha
        self.floor = max(1.0, math.exp((2 * b - 1) / (b * (1 - b))))

    def params(self):
        return {"alpha": self.alpha, "eta": self.eta}

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = (1 + self.eta) * t ** (1 - self.alpha) * np.log(t)
        return float(out) if out.ndim == 0 else out


class IterLog(GammaFunction):
    """c log_k t for t >= e_k."""

    family = "iterlog"

    def __init__(self, k: int, c: float):
        if int(k) != k or not 1 <= k <= 3:
            raise RangeError(f"iterlog needs k in 1..3 (e_k must be a float), got k={k}")
        if c <= 0:
            raise RangeError(f"iterlog needs c > 0, got c={c}")
        self.k = int(k)
        self.c = float(c)
        self.floor = e_tower(self.k).to_float()

    def params(self):
        return {"k": self.k, "c": self.c}

    def value(self, t):
        out = np.asarray(t, dtype=float)
        for _ in range(self.k):
            out = np.log(out)
        out = self.c * out
        return float(out) if out.ndim == 0 else out

    def inverse(self, y):
        x = y / self.c
        for _ in range(self.k):
            x = math.exp(x)
        return x


def eps_tower_slope(t: float) -> float:
    """epsilon(t): affine between (e_k, k) and (e_{k+1}, k+1), extended below e_1."""
    knots = [e_tower(k).to_float() for k in range(1, 4)]
    if t <= knots[1]:
        return 1.0 + (t - knots[0]) / (knots[1] - knots[0])
    if t <= knots[2]:
        return 2.0 + (t - knots[1]) / (knots[2] - knots[1])
    # the next knot e_4 is beyond double range; the slope 1/(e_4 - e_3) underflows
    return 3.0


class SqrtEps(GammaFunction):
    """sqrt(t) * epsilon(t) with epsilon(e_k) = k; a slowly unbounded perturbation of sqrt."""

    family = "sqrt_eps"
    floor = 1.0

    def params(self):
        return {}

    def value(self, t):
        arr = np.asarray(t, dtype=float)
        eps = np.vectorize(eps_tower_slope, otypes=[float])(arr)
        out = np.sqrt(arr) * eps
        return float(out) if out.ndim == 0 else out


class PiecewiseConcave(GammaFunction):
    """Piecewise-affine interpolant of concave increasing nodes, extended with the end slopes."""

    family = "piecewise_concave"

    def __init__(self, breakpoints, values):
        x = np.asarray(breakpoints, dtype=float)
        y = np.asarray(values, dtype=float)
        if x.shape != y.shape or len(x) < 2:
            raise ValueError("need at least two nodes")
        if np.any(np.diff(x) <= 0):
            raise ValueError("breakpoints must increase")
        s = np.diff(y) / np.diff(x)
        if np.any(s <= 0):
            raise ValueError("values must increase")
        if np.any(np.diff(s) > 1e-9 * np.maximum(1.0, np.abs(s[1:]))):
            raise ValueError("slopes must be nonincreasing")
        self.x, self.y, self.slopes = x, y, s
        self.floor = float(x[0])

    def params(self):
        return {"n": len(self.x), "first": float(self.x[0]), "last": float(self.x[-1])}

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.x, self.y)
        out = np.where(t > self.x[-1], self.y[-1] + self.slopes[-1] * (t - self.x[-1]), out)
        out = np.where(t < self.x[0], self.y[0] + self.slopes[0] * (t - self.x[0]), out)
        return float(out) if out.ndim == 0 else out

    def inverse(self, y):
        if y >= self.y[-1]:
            return float(self.x[-1] + (y - self.y[-1]) / self.slopes[-1])
        if y < self.y[0]:
            return float(self.x[0] + (y - self.y[0]) / self.slopes[0])
        return float(np.interp(y, self.y, self.x))


# -- reports ------------------------------------------------------------------


class Verdict(str, enum.Enum):
    ADMISSIBLE = "admissible_evidence"
    NON_ADMISSIBLE = "non_admissible_evidence"
    INCONCLUSIVE = "inconclusive"


def _growth_ok(ts, lr) -> bool:
    """Non-admissible evidence needs a strictly rising top decade and 10x total growth."""
    ts = np.asarray(ts)
    lr = np.asarray(lr)
    top = ts >= ts[-1] / 10.0
    d = np.diff(lr[top])
    return bool(len(d) >= 1 and np.all(d > 0) and lr[-1] - lr[0] > math.log(GROWTH_FACTOR))


@dataclass
class AdmissibilityReport:
    sup_log_ratio: float
    ratio_samples: list
    verdict: Verdict
    limit_estimate: float | None = None
    condition: str = "tilde_delta"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict is Verdict.NON_ADMISSIBLE:
            ts = [s[0] for s in self.ratio_samples]
            lr = [s[1] for s in self.ratio_samples]
            if not _growth_ok(ts, lr):
                raise ValueError("non-admissible evidence without the required growth")

    @property
    def sup_ratio(self) -> float:
        return math.exp(self.sup_log_ratio) if self.sup_log_ratio < 709 else math.inf

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": self.verdict.value,
            "sup_log_ratio": self.sup_log_ratio,
            "limit_estimate": self.limit_estimate,
            "growth_factor": GROWTH_FACTOR,
            "ratio_samples": [list(s) for s in self.ratio_samples],
            **self.extra,
        }


def _aitken(x0: float, x1: float, x2: float) -> float:
    d1, d2 = x1 - x0, x2 - x1
    den = d2 - d1
    if den == 0 or not math.isfinite(den) or abs(den) < 1e-15 * max(1.0, abs(x2)):
        return x2
    return x2 - d2 * d2 / den


def _tilde_delta_log_ratio(phi: DefiningFunction, gamma: GammaFunction, ts):
    ts = np.asarray(ts, dtype=float)
    return np.asarray(phi.log_ratio(ts, gamma.value(ts)), dtype=float)


def check_tilde_delta(phi: DefiningFunction, gamma: GammaFunction, grid: Grid) -> AdmissibilityReport:
    """Sample ln phi(t + gamma(t)) - ln phi(t) and judge whether it stays bounded."""
    ts = grid.array()
    lr = _tilde_delta_log_ratio(phi, gamma, ts)
    trend = classify_trend(ts, lr)
    samples = list(zip(ts.tolist(), lr.tolist()))
    limit = None
    if trend is Trend.BOUNDED:
        verdict = Verdict.ADMISSIBLE
        t_end = ts[-1]
        probe = _tilde_delta_log_ratio(phi, gamma, [t_end / 100, t_end / 10, t_end])
        limit = math.exp(_aitken(*probe.tolist()))
    elif trend is Trend.UNBOUNDED and _growth_ok(ts, lr):
        verdict = Verdict.NON_ADMISSIBLE
    else:
        verdict = Verdict.INCONCLUSIVE
    return AdmissibilityReport(float(np.max(lr)), samples, verdict, limit, "tilde_delta", {"phi": describe(phi), "gamma": gamma.render()})


def check_tilde_nabla(phi: DefiningFunction, gamma: GammaFunction, eps: float, grid: Grid) -> AdmissibilityReport:
    """Check ln phi(s + gamma(s)) - ln phi(s) >= (1 + eps) ln ln phi(s) on the grid."""
    if eps <= 0:
        raise RangeError("eps must be positive")
    ts = grid.array()
    lr = _tilde_delta_log_ratio(phi, gamma, ts)
    lphi = np.asarray(phi.log_value(ts), dtype=float)
    if np.any(lphi <= 0):
        raise RangeError("the lower growth condition needs phi(s) > 1 on the grid")
    margin = lr - (1 + eps) * np.log(lphi)
    top = ts >= ts[-1] / 10.0
    if np.all(margin >= 0):
        verdict = Verdict.ADMISSIBLE
    elif np.all(margin[top] < 0) and _growth_ok(ts, lr):
        verdict = Verdict.NON_ADMISSIBLE
    else:
        verdict = Verdict.INCONCLUSIVE
    failing = ts[margin < 0]
    extra = {
        "phi": describe(phi),
        "gamma": gamma.render(),
        "eps": eps,
        "min_margin": float(np.min(margin)),
        "first_failure": float(failing[0]) if len(failing) else None,
        "margins": [[float(t), float(m)] for t, m in zip(ts, margin)],
    }
    return AdmissibilityReport(float(np.max(lr)), list(zip(ts.tolist(), lr.tolist())), verdict, None, "tilde_nabla", extra)


def optimal_power_gamma(alpha: float, C: float) -> Power:
    """C t**(1 - alpha), the gauge matched to exp(t**alpha); limit ratio exp(alpha C)."""
    if not 0 < alpha < 1:
        raise RangeError("alpha must lie in (0, 1)")
    return Power(C, 1 - alpha)


# -- dyadic construction --------------------------------------------------------


def dyadic_levels(phi: DefiningFunction, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices n and levels t_n = phi^{-1}(2**n), starting where 2**n >= phi(floor)."""
    ln2 = math.log(2.0)
    n0 = 1
    if phi.floor > -math.inf:
        n0 = max(1, math.ceil(float(phi.log_value(phi.floor)) / ln2 - 1e-12))
    if n_max < n0 + 3:
        raise RangeError(f"n_max must be at least {n0 + 3} for this phi")
    ns = np.arange(n0, n_max + 1)
    ts = np.array([phi.invert_log(n * ln2) for n in ns])
    return ns, ts


def _check_gaps(gaps: np.ndarray) -> bool:
    d = np.diff(gaps)
    return bool(np.all(d > 1e-9 * np.maximum(1.0, np.abs(gaps[1:]))))


def _concave_minorant(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Left-anchored concave piecewise-affine minorant of the nodes (x, y)."""
    v = np.empty_like(y)
    v[0] = y[0]
    slope = math.inf
    for i in range(len(x) - 1):
        s = np.min((y[i + 1 :] - v[i]) / (x[i + 1 :] - x[i]))
        slope = min(slope, float(s))
        v[i + 1] = v[i] + slope * (x[i + 1] - x[i])
    return v


def dyadic_gamma(phi: DefiningFunction, n_max: int, refine: int = 8):
    """Concave gauge from the dyadic levels of phi, with the 4x growth check."""
    ns, ts = dyadic_levels(phi, n_max)
    gaps = np.diff(ts)
    if not _check_gaps(gaps):
        raise GapError(
            f"level gaps of {describe(phi)} do not increase (first {gaps[0]:.6g}, last {gaps[-1]:.6g})"
        )
    # gamma_1(t_n) = t_{n+1} - t_n, available where t_{n+1} exists
    x = ts[:-1]
    g1 = gaps
    v = _concave_minorant(x, g1)
    gamma = PiecewiseConcave(x, v)
    # chain phi(t + gamma(t)) <= phi(t_{n+2}) = 4 * 2^n <= 4 phi(t) needs t < t_{n_max - 2}
    pts = [np.linspace(ts[i], ts[i + 1], refine, endpoint=False) for i in range(len(ts) - 2)]
    check_t = np.concatenate(pts + [ts[-2:-1]])
    lr = np.asarray(phi.log_ratio(check_t, gamma.value(check_t)), dtype=float)
    ok = bool(np.all(lr <= math.log(4.0) + 1e-9))
    report = AdmissibilityReport(
        float(np.max(lr)),
        list(zip(check_t.tolist(), lr.tolist())),
        Verdict.ADMISSIBLE if ok else Verdict.INCONCLUSIVE,
        None,
        "dyadic_4x",
        {
            "phi": describe(phi),
            "bound_log": math.log(4.0),
            "levels": [[int(n), float(t)] for n, t in zip(ns, ts)],
            "gamma1": [[float(a), float(b)] for a, b in zip(x, g1)],
            "gamma": [[float(a), float(b)] for a, b in zip(x, v)],
        },
    )
    return gamma, report


def check_gap_divergence(phi: DefiningFunction, n_max: int):
    """Gaps t_{n+1} - t_n of the dyadic levels, with a divergence verdict."""
    ns, ts = dyadic_levels(phi, n_max)
    gaps = np.diff(ts)
    if _check_gaps(gaps):
        verdict = SeriesVerdict(
            SeriesKind.DIVERGENT,
            float(gaps[-1]),
            "gaps strictly increasing over the computed range (heuristic for gaps -> inf)",
            lower_bound=float(gaps[-1]),
            truncation=int(ns[-1]),
        )
    else:
        spread = float(np.max(gaps) - np.min(gaps))
        text = "gaps constant" if spread <= 1e-9 * max(1.0, float(np.max(np.abs(gaps)))) else "gaps not monotone"
        verdict = SeriesVerdict(SeriesKind.INCONCLUSIVE, float(gaps[-1]), text, truncation=int(ns[-1]))
    return verdict, gaps


# -- composition -----------------------------------------------------------------


class ComposedPsi(DefiningFunction):
    """t -> phi(gamma^{-1}(n t)); n = 1 gives psi_gamma itself."""

    family = "compose"

    def __init__(self, phi: DefiningFunction, gamma: GammaFunction, n: int = 1):
        if n < 1 or int(n) != n:
            raise RangeError("n must be a positive integer")
        self.phi, self.gamma, self.n = phi, gamma, int(n)
        self.floor = float(gamma.value(gamma.floor)) / self.n

    def params(self):
        return {"phi": describe(self.phi), "gamma": self.gamma.render(), "n": self.n}

    def dilated(self, n: int) -> "ComposedPsi":
        """The n-th dilate t -> psi(n t)."""
        return ComposedPsi(self.phi, self.gamma, self.n * n)

    def _log(self, t):
        u = self.gamma.inverse_array(np.asarray(t) * self.n)
        out = np.asarray(self.phi.log_value(u), dtype=float)
        return out

    def _dlog(self, t):
        h = 1e-6 * max(1.0, abs(t))
        return (float(self._log(np.asarray(t + h))) - float(self._log(np.asarray(t)))) / h

    def _inv(self, y):
        return float(self.gamma.value(self.phi.invert_log(y))) / self.n


def compose_psi(phi: DefiningFunction, gamma: GammaFunction) -> ComposedPsi:
    return ComposedPsi(phi, gamma, 1)
