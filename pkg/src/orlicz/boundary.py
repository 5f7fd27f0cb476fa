"""Boundary moduli on the circle (parametrised by [0, 1)), rearrangement and modulars."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .defining import DefiningFunction
from .errors import OrliczError, PartitionMismatch, PositionUnrepresentable
from .numerics import LogScalar, SeriesKind, SeriesVerdict, log_sum_exp

__all__ = [
    "StepFunction",
    "PositionedStepFunction",
    "ProfileFunction",
    "ModularValue",
    "rearrange_decreasing",
    "distribution",
    "modular",
    "luxemburg",
    "pointwise_product",
    "outer_eval",
    "thm32_extremal",
    "nabla_threshold",
    "decreasing_bound_check",
    "root_membership",
    "DIVERGENCE_BOUND",
]

DIVERGENCE_BOUND = 1e6
_MIN_PLACEABLE = 1e-300


def _remainder_log(log_measures: np.ndarray) -> float:
    total = log_sum_exp(log_measures.tolist()).log_value
    if total >= 0:
        return -math.inf
    return math.log(-math.expm1(total))


class StepFunction:
    """|f| on finitely many arcs given by (ln measure, ln value).

    Positions are implicit.  Whatever measure the arcs leave uncovered
    carries ``remainder_log_value`` (0 by default, i.e. |f| = 1 there).
    """

    def __init__(
        self,
        arcs: Sequence[tuple[float, float]],
        remainder_log_value: float = 0.0,
        remainder_log_measure: float | None = None,
    ):
        arr = np.asarray(list(arcs), dtype=float).reshape(-1, 2)
        self.log_measures = arr[:, 0].copy()
        self.log_values = arr[:, 1].copy()
        if np.any(~np.isfinite(self.log_measures)):
            raise ValueError("arc measures must be positive")
        if np.any(np.isnan(self.log_values)) or np.any(self.log_values == math.inf):
            raise ValueError("arc values must be finite (or zero)")
        if len(arr) and log_sum_exp(self.log_measures.tolist()).log_value > 1e-12:
            raise ValueError("arc measures sum to more than 1")
        self.remainder_log_value = float(remainder_log_value)
        if remainder_log_measure is None:
            remainder_log_measure = _remainder_log(self.log_measures) if len(arr) else 0.0
        self.remainder_log_measure = float(remainder_log_measure)

    @classmethod
    def from_measures(cls, measures, values, remainder_value: float = 1.0) -> "StepFunction":
        """Convenience constructor with plain (not log) measures and values."""
        with np.errstate(divide="ignore"):
            lm = np.log(np.asarray(measures, dtype=float))
            lv = np.log(np.asarray(values, dtype=float))
            rv = math.log(remainder_value) if remainder_value > 0 else -math.inf
        return cls(list(zip(lm, lv)), rv)

    @classmethod
    def indicator(cls, measure: float) -> "StepFunction":
        return cls([(math.log(measure), 0.0)], -math.inf)

    def __len__(self):
        return len(self.log_values)

    def __eq__(self, other):
        return (
            isinstance(other, StepFunction)
            and np.array_equal(self.log_measures, other.log_measures)
            and np.array_equal(self.log_values, other.log_values)
            and self.remainder_log_value == other.remainder_log_value
            and self.remainder_log_measure == other.remainder_log_measure
        )

    def explicit_arcs(self) -> tuple[np.ndarray, np.ndarray]:
        """(log measures, log values) including the remainder as an arc."""
        if self.remainder_log_measure > -math.inf:
            return (
                np.append(self.log_measures, self.remainder_log_measure),
                np.append(self.log_values, self.remainder_log_value),
            )
        return self.log_measures.copy(), self.log_values.copy()

    def shifted(self, log_factor: float) -> "StepFunction":
        """f * exp(log_factor)."""
        return StepFunction(
            list(zip(self.log_measures, self.log_values + log_factor)),
            self.remainder_log_value + log_factor,
            self.remainder_log_measure,
        )

    def root(self, n: int) -> "StepFunction":
        """|f|**(1/n)."""
        return StepFunction(
            list(zip(self.log_measures, self.log_values / n)),
            self.remainder_log_value / n,
            self.remainder_log_measure,
        )

    def to_dict(self) -> dict:
        return {
            "arcs": [{"log_measure": float(m), "log_value": float(v)} for m, v in zip(self.log_measures, self.log_values)],
            "remainder_log_value": self.remainder_log_value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StepFunction":
        arcs = [(a["log_measure"], a["log_value"]) for a in data["arcs"]]
        return cls(arcs, data.get("remainder_log_value", 0.0))


@dataclass(frozen=True)
class PositionedStepFunction:
    """Arcs (start, length, ln value) in the unit parameter s, with theta = 2 pi s."""

    arcs: tuple
    remainder_log_value: float = 0.0

    def __post_init__(self):
        arcs = tuple(sorted((float(a), float(b), float(c)) for a, b, c in self.arcs))
        object.__setattr__(self, "arcs", arcs)
        end = 0.0
        for start, length, value in arcs:
            if length <= 0 or start < 0 or start + length > 1 + 1e-15:
                raise ValueError("arcs must lie in [0, 1] with positive length")
            if start < end - 1e-15:
                raise ValueError("arcs overlap")
            if not math.isfinite(value):
                raise ValueError("positioned arcs need finite values")
            end = start + length

    @classmethod
    def place(cls, f: StepFunction) -> "PositionedStepFunction":
        """Lay the arcs of ``f`` end to end from 0."""
        if np.any(f.log_measures < math.log(_MIN_PLACEABLE)):
            raise PositionUnrepresentable("arc measures below 1e-300 cannot be given machine positions")
        if not math.isfinite(f.remainder_log_value) and f.remainder_log_measure > -math.inf:
            raise PositionUnrepresentable("zero modulus on a set of positive measure has no outer function")
        arcs, s = [], 0.0
        for m, v in zip(np.exp(f.log_measures), f.log_values):
            arcs.append((s, float(m), float(v)))
            s += float(m)
        return cls(tuple(arcs), f.remainder_log_value)

    def to_step(self) -> StepFunction:
        return StepFunction([(math.log(l), v) for _, l, v in self.arcs], self.remainder_log_value)

    def log_value_at(self, s: float) -> float:
        s = s % 1.0
        for start, length, value in self.arcs:
            if start <= s < start + length:
                return value
        return self.remainder_log_value

    def covered_gaps(self):
        """Uncovered intervals, carrying the remainder value."""
        gaps, end = [], 0.0
        for start, length, _ in self.arcs:
            if start > end:
                gaps.append((end, start - end))
            end = start + length
        if end < 1.0:
            gaps.append((end, 1.0 - end))
        return gaps

    def to_dict(self):
        return {
            "arcs": [{"start": a, "length": b, "log_value": c} for a, b, c in self.arcs],
            "remainder_log_value": self.remainder_log_value,
        }


@dataclass
class ProfileFunction:
    """ln|f(t)| on (0, 1] given by a formula.

    ``turning_points`` split (0, 1] into pieces on which the modular
    integrand is monotone; ``tail`` optionally returns ln of the exact
    integral of Phi(|f|) over (0, delta].
    """

    name: str
    log_value: Callable
    params: dict = field(default_factory=dict)
    monotone: bool = True
    turning_points: tuple = ()
    tail: Callable | None = None
    integrand_log: Callable | None = None

    def __call__(self, t):
        return self.log_value(t)


@dataclass
class ModularValue:
    value: LogScalar
    error_bound: float | None = None
    certificate: SeriesVerdict | None = None
    note: str = ""

    def __post_init__(self):
        if self.value.is_finite() and self.error_bound is None:
            raise ValueError("a finite modular needs an error bound")
        if not self.value.is_finite() and self.certificate is None:
            raise ValueError("an infinite modular needs a divergence certificate")

    @property
    def finite(self) -> bool:
        return self.value.is_finite()

    def to_dict(self) -> dict:
        return {
            "log_value": self.value.log_value,
            "value": self.value.value,
            "error_bound": self.error_bound,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "note": self.note,
        }


def rearrange_decreasing(f: StepFunction) -> StepFunction:
    """Arcs sorted by value, largest first; the remainder becomes an explicit arc."""
    lm, lv = f.explicit_arcs()
    order = np.argsort(-lv, kind="stable")
    return StepFunction(list(zip(lm[order], lv[order])), f.remainder_log_value, -math.inf)


def distribution(f: StepFunction, level: LogScalar | float) -> LogScalar:
    """Measure of {|f| > level}, strict inequality."""
    lvl = level.log_value if isinstance(level, LogScalar) else float(level)
    lm, lv = f.explicit_arcs()
    return log_sum_exp(lm[lv > lvl].tolist())


def _step_modular(f: StepFunction, phi: DefiningFunction) -> ModularValue:
    lm, lv = f.explicit_arcs()
    with np.errstate(invalid="ignore"):
        terms = np.asarray(phi.log_value(lv), dtype=float) + lm
    terms = terms[terms > -math.inf]
    total = log_sum_exp(terms.tolist())
    # relative error of one exp per term plus one correctly rounded sum
    err = (len(terms) + 2) * np.finfo(float).eps * total.value if total.is_finite() else None
    if not total.is_finite():
        cert = SeriesVerdict(SeriesKind.DIVERGENT, math.inf, "an arc carries an infinite term", lower_bound=math.inf)
        return ModularValue(total, None, cert, "exact log-scale sum")
    return ModularValue(total, float(err), None, "exact log-scale sum")


def _profile_modular(
    f: ProfileFunction,
    phi: DefiningFunction,
    cells: int = 60,
    per_cell: int = 64,
    divergence_bound: float = DIVERGENCE_BOUND,
) -> ModularValue:
    """Integrate Phi(|f|) over dyadic cells toward 0 with monotone bracketing."""

    def integrand(t):
        if f.integrand_log is not None:
            return np.exp(np.asarray(f.integrand_log(t), dtype=float))
        return np.exp(np.asarray(phi.log_value(np.asarray(f.log_value(t), dtype=float)), dtype=float))

    delta = 2.0 ** (-cells)
    cuts = sorted({2.0**-k for k in range(cells + 1)} | {float(p) for p in f.turning_points if delta < p < 1})
    lower = upper = 0.0
    contribs = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        xs = np.linspace(a, b, per_cell + 1)
        ys = integrand(xs)
        h = (b - a) / per_cell
        lo = float(np.sum(np.minimum(ys[:-1], ys[1:])) * h)
        hi = float(np.sum(np.maximum(ys[:-1], ys[1:])) * h)
        lower += lo
        upper += hi
        contribs.append(lo)
        if lower > divergence_bound:
            rising = len(contribs) >= 3 and contribs[-1] >= contribs[-2] >= contribs[-3]
            if rising:
                cert = SeriesVerdict(
                    SeriesKind.DIVERGENT,
                    lower,
                    f"partial integral exceeds {divergence_bound:g} with nondecreasing dyadic cell contributions",
                    lower_bound=lower,
                    truncation=len(contribs),
                )
                return ModularValue(LogScalar.infinity(), None, cert, "dyadic monotone bracketing")
    if f.tail is not None:
        tail = math.exp(f.tail(delta))
        mid = 0.5 * (lower + upper) + tail
        err = 0.5 * (upper - lower) + 1e-12 * mid
        return ModularValue(LogScalar.from_value(mid), err, None, f"dyadic bracketing on [{delta:.3e}, 1] plus exact tail")
    return ModularValue(
        LogScalar.from_value(0.5 * (lower + upper)),
        math.inf,
        None,
        "no tail bound: value covers [delta, 1] only",
    )


def modular(f, phi: DefiningFunction, **kw) -> ModularValue:
    """Integral of Phi(|f|) over the circle (normalised measure)."""
    if isinstance(f, PositionedStepFunction):
        f = f.to_step()
    if isinstance(f, StepFunction):
        return _step_modular(f, phi)
    if isinstance(f, ProfileFunction):
        return _profile_modular(f, phi, **kw)
    raise TypeError(f"cannot integrate {type(f).__name__}")


def luxemburg(f: StepFunction, phi: DefiningFunction, tol: float = 1e-12) -> float:
    """inf{t > 0 : J(f / t) <= 1}, by root-finding on ln t.

    This is a norm only when the capital function is convex; otherwise it
    is just the gauge functional.
    """
    lm, lv = f.explicit_arcs()
    keep = lv > -math.inf
    lm, lv = lm[keep], lv[keep]
    if len(lv) == 0:
        raise ValueError("f vanishes almost everywhere")

    def F(u):
        with np.errstate(invalid="ignore"):
            terms = np.asarray(phi.log_value(lv - u), dtype=float) + lm
        val = log_sum_exp(terms[terms > -math.inf].tolist()).log_value
        return min(max(val, -700.0), 700.0)

    lo, hi = -1.0, 1.0
    step = 1.0
    while F(lo) <= 0:
        step *= 2
        lo -= step
        if step > 1e6:
            return 0.0
    step = 1.0
    while F(hi) > 0:
        step *= 2
        hi += step
        if step > 1e6:
            raise OrliczError("Luxemburg bracket failed")
    u = brentq(F, lo, hi, xtol=min(tol, 1e-12) * 1e-2, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(u)


def pointwise_product(f: StepFunction, g: StepFunction, alignment: str = "aligned") -> StepFunction:
    """|f g| on shared arcs (aligned) or with f decreasing against g increasing (antialigned)."""
    if alignment == "aligned":
        if len(f) != len(g) or not np.allclose(f.log_measures, g.log_measures, rtol=0, atol=1e-12):
            raise PartitionMismatch("aligned product needs identical arc partitions")
        return StepFunction(
            list(zip(f.log_measures, f.log_values + g.log_values)),
            f.remainder_log_value + g.remainder_log_value,
            f.remainder_log_measure,
        )
    if alignment != "antialigned":
        raise ValueError(f"unknown alignment {alignment!r}")
    fm, fv = rearrange_decreasing(f).explicit_arcs()
    gm, gv = rearrange_decreasing(g).explicit_arcs()
    gm, gv = gm[::-1], gv[::-1]
    fc = np.concatenate([[0.0], np.cumsum(np.exp(fm))])
    gc = np.concatenate([[0.0], np.cumsum(np.exp(gm))])
    cuts = np.unique(np.concatenate([fc, gc]))
    cuts = cuts[cuts <= min(fc[-1], gc[-1]) + 1e-15]
    arcs = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 0:
            continue
        mid = 0.5 * (a + b)
        i = min(np.searchsorted(fc, mid) - 1, len(fv) - 1)
        j = min(np.searchsorted(gc, mid) - 1, len(gv) - 1)
        arcs.append((math.log(b - a), fv[i] + gv[j]))
    return StepFunction(arcs, f.remainder_log_value + g.remainder_log_value, -math.inf)


def _arc_herglotz(start: float, length: float, z: complex) -> complex:
    """Integral over the arc of (zeta + z) / (zeta - z) dm(zeta), in closed form."""
    th1 = 2 * math.pi * start
    th2 = 2 * math.pi * (start + length)
    z1 = cmath.exp(1j * th1) - z
    z2 = cmath.exp(1j * th2) - z
    if length >= 1.0 - 1e-15:
        darg = 2 * math.pi
    else:
        darg = cmath.phase(z2 / z1) % (2 * math.pi)
    log_mod = math.log(abs(z2)) - math.log(abs(z1))
    # -1 + 2 zeta / (zeta - z): the second part integrates to Log(zeta - z) / (pi i)
    return complex(-length + darg / math.pi, -log_mod / math.pi)


def outer_eval(f: PositionedStepFunction | StepFunction, z: complex) -> complex:
    """log F(z) for the outer function F with |F| = |f| on the circle."""
    if isinstance(f, StepFunction):
        f = PositionedStepFunction.place(f)
    if abs(z) >= 1:
        raise ValueError("z must lie in the open unit disk")
    total = 0j
    for start, length, value in f.arcs:
        if value != 0.0:
            total += value * _arc_herglotz(start, length, z)
    if f.remainder_log_value != 0.0:
        if not math.isfinite(f.remainder_log_value):
            gaps = f.covered_gaps()
            if gaps:
                raise PositionUnrepresentable("zero modulus on a set of positive measure")
        else:
            for start, length in f.covered_gaps():
                total += f.remainder_log_value * _arc_herglotz(start, length, z)
    return total


def _log_w(t, eta):
    t = np.asarray(t, dtype=float)
    lt = np.log(t)
    return 1.0 - lt - (1 + eta) * np.log(1.0 - lt)


def nabla_threshold(eta: float, eps: float, u_max: float = 1e6) -> dict:
    """Largest t* with w ln^{1+eps} w >= e/t for every t <= t*.

    Worked in u = -ln t so that arbitrarily small t are reachable.
    """
    if eps <= eta:
        raise ValueError("the inequality needs eps > eta")

    def margin(u):
        lw = 1.0 + u - (1 + eta) * math.log1p(u)
        if lw <= 0:
            return -math.inf
        return lw + (1 + eps) * math.log(lw) - (1.0 + u)

    us = np.geomspace(1e-6, u_max, 4000)
    ms = np.array([margin(u) for u in us])
    if ms[-1] < 0:
        raise OrliczError("inequality not reached within the scan range")
    bad = np.nonzero(ms < 0)[0]
    if len(bad) == 0:
        return {"u_star": 0.0, "t_star": 1.0, "eta": eta, "eps": eps}
    i = bad[-1]
    u_star = brentq(margin, us[i], us[i + 1]) if math.isfinite(ms[i]) else float(us[i + 1])
    return {"u_star": u_star, "t_star": math.exp(-u_star), "eta": eta, "eps": eps}


def thm32_extremal(phi: DefiningFunction, eta: float):
    """The profile w(t) = e / (t ln^{1+eta}(e/t)) and f with ln|f| = phi^{-1}(w)."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    turn = math.exp(-eta)

    def tail(delta):
        return math.log(math.e / eta) - eta * math.log(1.0 - math.log(delta))

    w = ProfileFunction(
        "w",
        lambda t: _log_w(t, eta),
        {"eta": eta},
        monotone=False,
        turning_points=(turn,),
        tail=tail,
    )
    inv = np.vectorize(lambda y: phi.invert_log(float(y)), otypes=[float])
    f = ProfileFunction(
        "extremal",
        lambda t: inv(_log_w(t, eta)),
        {"eta": eta},
        monotone=False,
        turning_points=(turn,),
        tail=tail,
    )
    return w, f


def decreasing_bound_check(f: StepFunction, bound: float) -> dict:
    """t f(t) <= bound at each arc right endpoint of a decreasing f."""
    lm, lv = f.explicit_arcs()
    if np.any(np.diff(lv) > 0):
        raise ValueError("f must be decreasing; rearrange first")
    m = np.exp(lm)
    s = np.cumsum(m)
    with np.errstate(under="ignore"):
        vals = np.exp(lv)
    integral = math.fsum((m * vals).tolist())
    prods = s * vals
    ok = prods <= bound * (1 + 1e-12)
    worst = int(np.argmax(prods))
    return {
        "holds": bool(np.all(ok)),
        "bound": bound,
        "integral": integral,
        "worst_index": worst,
        "worst_value": float(prods[worst]),
        "first_violation": int(np.nonzero(~ok)[0][0]) if not np.all(ok) else None,
    }


def root_membership(f: StepFunction, psi: DefiningFunction, n_max: int, bound: float = DIVERGENCE_BOUND) -> int | None:
    """Smallest n <= n_max with J(|f|^{1/n}) <= bound."""
    for n in range(1, n_max + 1):
        mv = _step_modular(f.root(n), psi)
        if mv.finite and mv.value.log_value <= math.log(bound):
            return n
    return None
