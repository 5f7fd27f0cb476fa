"""Unit-disk geometry, Carleson constants, paired sequences and the Calderon split."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import ModularValue, StepFunction
from .defining import DefiningFunction
from .errors import PlacementError, RangeError
from .numerics import LogScalar, log_sum_exp

__all__ = [
    "DiskPoint",
    "DiskSequence",
    "PairedSequences",
    "WeightedSequence",
    "Rearrangement",
    "pseudo_distance",
    "carleson_constant",
    "radial_carleson",
    "blaschke_weights",
    "pair_with_targets",
    "trace_sum",
    "weighted_rearrangement",
    "calderon_split",
    "majorization_leq",
    "capital_inverse",
]


@dataclass(frozen=True)
class DiskPoint:
    """A point of the open unit disk kept as (1 - |z|, arg z).

    Storing the co-radius keeps points at distance 2^-40 from the circle
    fully resolved.
    """

    co_radius: float
    angle: float = 0.0

    def __post_init__(self):
        if not 0 < self.co_radius <= 1:
            raise ValueError(f"co-radius must lie in (0, 1], got {self.co_radius}")

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        r = abs(z)
        if r >= 1:
            raise ValueError("point outside the open disk")
        return cls(1.0 - r, math.atan2(z.imag, z.real) if r > 0 else 0.0)

    @property
    def modulus(self) -> float:
        return 1.0 - self.co_radius

    @property
    def re(self) -> float:
        return self.modulus * math.cos(self.angle)

    @property
    def im(self) -> float:
        return self.modulus * math.sin(self.angle)

    def __complex__(self):
        return complex(self.re, self.im)

    @property
    def weight(self) -> float:
        """1 - |z|^2."""
        return self.co_radius * (2.0 - self.co_radius)


def pseudo_distance(a: DiskPoint, b: DiskPoint) -> float:
    """|b_a(b)| = |a - b| / |1 - conj(a) b|, computed from co-radii."""
    ua, ub = a.co_radius, b.co_radius
    ra, rb = 1.0 - ua, 1.0 - ub
    s2 = 4.0 * ra * rb * math.sin(0.5 * (a.angle - b.angle)) ** 2
    num = (ub - ua) ** 2 + s2
    den = (ua + ub - ua * ub) ** 2 + s2
    return math.sqrt(num / den)


@dataclass(frozen=True)
class DiskSequence:
    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(set((p.co_radius, p.angle) for p in pts)) != len(pts):
            raise ValueError("points must be distinct")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __add__(self, other: "DiskSequence") -> "DiskSequence":
        return DiskSequence(self.points + other.points)

    def weights(self) -> np.ndarray:
        return np.array([p.weight for p in self.points])

    def to_dict(self) -> dict:
        return {
            "points": [
                {"re": p.re, "im": p.im, "co_radius": p.co_radius, "angle": p.angle} for p in self.points
            ]
        }


def carleson_constant(seq: DiskSequence) -> float:
    """min over lambda of prod_{mu != lambda} |b_mu(lambda)|, in log scale."""
    pts = seq.points
    if len(pts) <= 1:
        return 1.0
    worst = math.inf
    for i, p in enumerate(pts):
        logs = [math.log(pseudo_distance(p, q)) for j, q in enumerate(pts) if j != i]
        worst = min(worst, math.fsum(logs))
    return math.exp(worst)


def radial_carleson(q: float, N: int) -> DiskSequence:
    """lambda_n = 1 - q^n for n = 1..N."""
    if not 0 < q < 1:
        raise RangeError("q must lie in (0, 1)")
    return DiskSequence(tuple(DiskPoint(q**n, 0.0) for n in range(1, N + 1)))


def blaschke_weights(seq: DiskSequence, scale: float = 1.0):
    """gamma_n = scale / sqrt(tail_n) with tail_n = sum_{m >= n} (1 - |lambda_m|^2).

    Returns gamma and a report with sum w_n gamma_n and its telescoping
    bound 2 scale sqrt(tail_1).
    """
    w = seq.weights()
    tails = np.array([math.fsum(w[i:].tolist()) for i in range(len(w))])
    gamma = scale / np.sqrt(tails)
    total = math.fsum((w * gamma).tolist())
    bound = 2.0 * scale * math.sqrt(tails[0])
    return gamma, {
        "sum_w_gamma": total,
        "telescoping_bound": bound,
        "margin": bound - total,
        "scale": scale,
        "increasing": bool(np.all(np.diff(gamma) > 0)),
    }


def capital_inverse(psi: DefiningFunction, y: float) -> float:
    """Psi^{-1}(y) for the capital form Psi(x) = psi(ln x)."""
    return math.exp(psi.invert_log(math.log(y)))


@dataclass(frozen=True)
class PairedSequences:
    lambda1: DiskSequence
    lambda2: DiskSequence
    separations: tuple

    def __post_init__(self):
        if len(self.lambda1) != len(self.lambda2) or len(self.separations) != len(self.lambda1):
            raise ValueError("paired sequences must have equal length")
        for a, b, d in zip(self.lambda1, self.lambda2, self.separations):
            if abs(pseudo_distance(a, b) - d) > 1e-12:
                raise ValueError("separation does not match the placed points")

    def union(self) -> DiskSequence:
        return self.lambda1 + self.lambda2


def pair_with_targets(
    lam1: DiskSequence,
    psi: DefiningFunction,
    gamma,
    decay_floor=None,
) -> PairedSequences:
    """Place lambda_{n,2} radially outside lambda_{n,1} at distance max(2/(Psi^{-1}(gamma_n) - 1), floor_n)."""
    gamma = np.asarray(gamma, dtype=float)
    if len(gamma) != len(lam1):
        raise ValueError("one target per point")
    floors = np.zeros(len(gamma)) if decay_floor is None else np.broadcast_to(np.asarray(decay_floor, dtype=float), gamma.shape)
    pts2, ds = [], []
    for p, g, fl in zip(lam1, gamma, floors):
        x = capital_inverse(psi, g)
        if x <= 1.0:
            raise PlacementError(f"Psi^-1(gamma) = {x} must exceed 1")
        d = max(2.0 / (x - 1.0), float(fl))
        if d >= 1.0:
            raise PlacementError(f"separation {d} leaves the disk")
        u1 = p.co_radius
        # (r2 - r1)/(1 - r1 r2) = d, written in co-radii
        u2 = u1 * (1.0 - d) / (1.0 + (1.0 - u1) * d)
        if not u2 > 0:
            raise PlacementError("placed point reaches the circle")
        q = DiskPoint(u2, p.angle)
        pts2.append(q)
        ds.append(pseudo_distance(p, q))
    return PairedSequences(lam1, DiskSequence(tuple(pts2)), tuple(ds))


def trace_sum(pair: PairedSequences, psi: DefiningFunction, a=None, worst_case: bool = False, gamma=None):
    """sum_n w_n Psi(|a_{n,1}| + |a_{n,2} - a_{n,1}| / d_n) in log scale.

    ``a`` has shape (N, 2) with |a| <= 1.  In worst-case mode the argument
    is 1 + 2/d_n; passing ``gamma`` also certifies term_n <= w_n gamma_n.
    """
    w = pair.lambda1.weights()
    d = np.asarray(pair.separations)
    if worst_case:
        x = 1.0 + 2.0 / d
    else:
        a = np.asarray(a, dtype=float).reshape(len(w), 2)
        if np.any(np.abs(a) > 1):
            raise ValueError("the data must satisfy |a| <= 1")
        x = np.abs(a[:, 0]) + np.abs(a[:, 1] - a[:, 0]) / d
    with np.errstate(divide="ignore"):
        lx = np.log(x)
        log_terms = np.log(w) + np.asarray(psi.log_value(lx), dtype=float)
    total = log_sum_exp(log_terms.tolist())
    err = (len(w) + 2) * np.finfo(float).eps * total.value
    mv = ModularValue(total, float(err), None, "finite sum in log scale")
    info = {"log_terms": log_terms.tolist()}
    if gamma is not None:
        gamma = np.asarray(gamma, dtype=float)
        log_caps = np.log(w) + np.log(gamma)
        info["term_le_cap"] = bool(np.all(log_terms <= log_caps + 1e-9))
        cap = math.fsum((w * gamma).tolist())
        info["cap_sum"] = cap
        info["margin"] = cap - total.value
    return mv, info


# -- weighted sequences ------------------------------------------------------------


@dataclass(frozen=True)
class WeightedSequence:
    values: tuple
    weights: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        w = tuple(float(x) for x in self.weights)
        if len(v) != len(w) or not v:
            raise ValueError("values and weights must be nonempty and equally long")
        if any(not x > 0 for x in w):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return math.fsum(self.weights)

    def array(self):
        return np.array(self.values), np.array(self.weights)


@dataclass(frozen=True)
class Rearrangement:
    """Decreasing step function on [0, L]: ``values`` on consecutive pieces of ``lengths``."""

    values: tuple
    lengths: tuple

    @property
    def breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.lengths)])

    @property
    def total(self) -> float:
        return math.fsum(self.lengths)

    def value_at(self, s: float) -> float:
        """a*(s), right-continuous; a*(L) is the smallest value."""
        bps = self.breakpoints
        k = int(np.searchsorted(bps, s, side="right")) - 1
        return self.values[min(max(k, 0), len(self.values) - 1)]

    def integral(self, s: float) -> float:
        """int_0^s a*."""
        bps = self.breakpoints
        parts = []
        for v, a, b in zip(self.values, bps[:-1], bps[1:]):
            if s <= a:
                break
            parts.append(v * (min(s, b) - a))
        return math.fsum(parts)

    def to_step(self) -> StepFunction:
        """Normalise to total measure 1 for use with modulars."""
        L = self.total
        with np.errstate(divide="ignore"):
            arcs = [(math.log(l / L), math.log(v) if v > 0 else -math.inf) for v, l in zip(self.values, self.lengths)]
        return StepFunction(arcs, -math.inf, -math.inf)


def weighted_rearrangement(a: WeightedSequence) -> Rearrangement:
    """|a_n| sorted decreasingly with weights as lengths; equal values merged."""
    v, w = a.array()
    v = np.abs(v)
    order = np.lexsort((w, -v))
    vals, lens = [], []
    for i in order:
        if vals and vals[-1] == v[i]:
            lens[-1].append(w[i])
        else:
            vals.append(float(v[i]))
            lens.append([w[i]])
    return Rearrangement(tuple(vals), tuple(math.fsum(l) for l in lens))


def _round_away(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """fl(x - y) nudged up so that it is >= x - y exactly (x >= y >= 0)."""
    s = x - y
    # two-sum residual of x + (-y)
    bb = s - x
    r = (x - (s - bb)) + (-y - bb)
    return np.where(r > 0, np.nextafter(s, np.inf), s)


def calderon_split(a: WeightedSequence, s: float):
    """Split a = b + c at a rearrangement breakpoint s.

    c is a clipped to modulus a*(s) and b the excess.  The excess is
    rounded away from zero so that c = a - b is exact and |c| <= a*(s).
    """
    r = weighted_rearrangement(a)
    bps = r.breakpoints
    k = int(np.argmin(np.abs(bps - s)))
    if abs(bps[k] - s) > 1e-12 * max(1.0, r.total):
        raise ValueError(f"s={s} is not a rearrangement breakpoint")
    level = r.values[min(k, len(r.values) - 1)]
    v, w = a.array()
    mag = np.abs(v)
    sign = np.sign(v)
    over = mag > level
    excess = np.where(over, _round_away(mag, np.full_like(mag, level)), 0.0)
    b = sign * excess
    c = np.where(over, v - b, v)
    return WeightedSequence(tuple(b), a.weights), WeightedSequence(tuple(c), a.weights), {
        "s": float(bps[k]),
        "level": level,
        "b_norm": math.fsum((np.abs(b) * w).tolist()),
        "identity_rhs": math.fsum([r.integral(float(bps[k])), -float(bps[k]) * level]),
    }


def majorization_leq(u: WeightedSequence, v: WeightedSequence, tol: float = 1e-12) -> bool:
    """int_0^s u* <= int_0^s v* for every s (checked at all breakpoints of both)."""
    ru, rv = weighted_rearrangement(u), weighted_rearrangement(v)
    Lu, Lv = ru.total, rv.total
    # pad the shorter one with zero values
    if Lu < Lv:
        ru = Rearrangement(ru.values + (0.0,), ru.lengths + (Lv - Lu,))
    elif Lv < Lu:
        rv = Rearrangement(rv.values + (0.0,), rv.lengths + (Lu - Lv,))
    cuts = np.unique(np.concatenate([ru.breakpoints, rv.breakpoints]))
    for s in cuts:
        iu, iv = ru.integral(float(s)), rv.integral(float(s))
        if iu > iv + tol * max(1.0, abs(iv)):
            return False
    return True
