"""Explicit non-multiplier witnesses built from level data, with series certificates."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .admissibility import ComposedPsi, GammaFunction, SqrtEps, eps_tower_slope
from .boundary import ModularValue, ProfileFunction, StepFunction, _log_w, modular, pointwise_product, rearrange_decreasing
from .defining import DefiningFunction, ExpPow, StaircasePhi, describe
from .errors import LevelExhaustion, SearchFailure
from .numerics import (
    LogScalar,
    SeriesKind,
    SeriesVerdict,
    TowerScalar,
    basel_certificate,
    e_tower,
    harmonic_certificate,
    iterated,
    tower_compare,
)

__all__ = [
    "CounterexampleReport",
    "prop34_build",
    "thm43_refute",
    "thm42_inclusion_check",
    "thm32_envelope",
    "envelope_compliance",
    "SCAN_RATIO",
]

SCAN_RATIO = 1.05
SCAN_CEILING = 1e300


@dataclass
class CounterexampleReport:
    f: StepFunction
    g: StepFunction
    modular_f: ModularValue
    modular_g: ModularValue
    modular_product: ModularValue
    level_data: list
    narrative: list
    product_lower_bound: float
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.modular_f.finite or self.modular_f.certificate is None:
            raise ValueError("f needs a finite modular with a tail bound")
        if self.modular_f.certificate.kind is not SeriesKind.CONVERGENT:
            raise ValueError("f needs a convergent certificate")
        cert = self.modular_product.certificate
        if cert is None or cert.kind is not SeriesKind.DIVERGENT:
            raise ValueError("the product needs a divergence certificate")

    def to_dict(self) -> dict:
        return {
            "modular_f": self.modular_f.to_dict(),
            "modular_g": self.modular_g.to_dict(),
            "modular_product": self.modular_product.to_dict(),
            "product_lower_bound": self.product_lower_bound,
            "levels": self.level_data,
            "narrative": self.narrative,
            **self.extra,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = list(self.level_data[0].keys()) if self.level_data else []
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for row in self.level_data:
            w.writerow({k: (f"{v:.12e}" if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()


def _with_certificate(mv: ModularValue, cert: SeriesVerdict) -> ModularValue:
    return ModularValue(mv.value, mv.error_bound, cert, mv.note)


def _first_crossing(ts: np.ndarray, vals: np.ndarray, targets: np.ndarray, fn) -> np.ndarray:
    """Smallest t with fn(t) >= target, per target: running max on the scan, then bisection."""
    runmax = np.maximum.accumulate(vals)
    idx = np.searchsorted(runmax, targets, side="left")
    if np.any(idx >= len(ts)):
        bad = int(np.argmax(idx >= len(ts)))
        raise SearchFailure(f"no level found below the scan ceiling for target {targets[bad]:.6g}")
    hi = ts[idx]
    lo = np.where(idx > 0, ts[np.maximum(idx - 1, 0)], ts[0])
    exact = idx == 0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        ok = np.asarray(fn(mid), dtype=float) >= targets
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return np.where(exact, ts[0], hi)


def prop34_build(phi: DefiningFunction, gamma: GammaFunction, N: int, t_start: float | None = None) -> CounterexampleReport:
    """Levels t_n with phi(t_n + gamma(t_n)) >= n phi(t_n) and phi(t_n) >= 2^n / n^2.

    The arcs get measure eps_n = 1 / (n^2 phi(t_n)); f = e^{t_n} and
    g = e^{gamma(t_n)} there, and zero elsewhere.
    """
    if N < 1:
        raise ValueError("N must be positive")
    t0 = t_start if t_start is not None else max(phi.floor, gamma.floor, 1.0)
    n_pts = int(math.log(SCAN_CEILING / t0) / math.log(SCAN_RATIO)) + 1
    ts = t0 * SCAN_RATIO ** np.arange(n_pts)
    ts = ts[np.isfinite(ts)]
    ratio_fn = lambda t: phi.log_ratio(t, gamma.value(t))
    with np.errstate(over="ignore", invalid="ignore"):
        lr_scan = np.asarray(ratio_fn(ts), dtype=float)
        lphi_scan = np.asarray(phi.log_value(ts), dtype=float)
    lr_scan = np.where(np.isnan(lr_scan), -np.inf, lr_scan)
    ns = np.arange(1, N + 1, dtype=float)
    target_ratio = np.log(ns)
    target_size = ns * math.log(2.0) - 2 * np.log(ns)
    ta = _first_crossing(ts, lr_scan, target_ratio, ratio_fn)
    tb = _first_crossing(ts, lphi_scan, target_size, phi.log_value)
    tn = np.maximum(ta, tb)
    lr = np.asarray(ratio_fn(tn), dtype=float)
    lphi = np.asarray(phi.log_value(tn), dtype=float)
    # the ratio need not be monotone: push forward along the scan where the max broke it
    for i in np.nonzero(lr < target_ratio)[0]:
        j = np.searchsorted(ts, tn[i])
        while j < len(ts) and (lr_scan[j] < target_ratio[i] or lphi_scan[j] < target_size[i]):
            j += 1
        if j == len(ts):
            raise SearchFailure(f"no level satisfies both conditions for n={i + 1}")
        tn[i], lr[i], lphi[i] = ts[j], lr_scan[j], lphi_scan[j]

    log_eps = -2 * np.log(ns) - lphi
    gv = np.asarray(gamma.value(tn), dtype=float)
    f = StepFunction(list(zip(log_eps, tn)), -math.inf)
    g = StepFunction(list(zip(log_eps, gv)), -math.inf)
    psi = ComposedPsi(phi, gamma)
    fg = pointwise_product(f, g, "aligned")

    basel = basel_certificate(N)
    harm = harmonic_certificate(N)
    mf = _with_certificate(modular(f, phi), basel)
    mg = _with_certificate(modular(g, psi), basel)
    mp = _with_certificate(modular(fg, phi), harm)

    f_terms = np.exp(lphi + log_eps)
    p_terms = np.exp(lr + lphi + log_eps)
    cum_f = np.cumsum(f_terms)
    cum_p = np.cumsum(p_terms)
    levels = [
        {
            "n": int(n),
            "t_n": float(t),
            "log_eps_n": float(le),
            "log_ratio": float(r),
            "partial_f": float(a),
            "partial_product": float(b),
        }
        for n, t, le, r, a, b in zip(ns, tn, log_eps, lr, cum_f, cum_p)
    ]
    narrative = [
        "phi(t_n) eps_n = 1/n^2, so J(f) is the partial sum of 1/n^2 (tail <= 1/N)",
        "psi(gamma(t_n)) = phi(t_n), so J(g) under psi equals J(f)",
        "phi(t_n + gamma(t_n)) eps_n >= n phi(t_n) eps_n = 1/n, so J(fg) >= H_N",
    ]
    return CounterexampleReport(
        f,
        g,
        mf,
        mg,
        mp,
        levels,
        narrative,
        harm.lower_bound,
        {
            "phi": describe(phi),
            "gamma": gamma.render(),
            "N": N,
            "scan_ratio": SCAN_RATIO,
            "per_level_ok": bool(np.all(lr >= target_ratio) and np.all(lphi >= target_size)),
            "measure_total_log": LogScalar(float(np.logaddexp.reduce(log_eps))).log_value,
        },
    )


def thm43_refute(phi: StaircasePhi, K: int) -> CounterexampleReport:
    """Unbounded g with level sets sigma_k of measure 2^-k against the staircase phi."""
    if K < 1:
        raise ValueError("K must be positive")
    lvals = phi.log_values
    ks = np.arange(1, K + 1, dtype=float)
    log_sigma = -ks * math.log(2.0)
    need = -2 * np.log(ks) - log_sigma
    # smallest admissible breakpoint per level, made nondecreasing in k
    n_idx = np.maximum.accumulate(np.searchsorted(lvals, need, side="left"))
    if np.any(n_idx >= len(lvals)):
        k_bad = int(ks[np.argmax(n_idx >= len(lvals))])
        raise LevelExhaustion(f"staircase has {len(lvals)} breakpoints; level k={k_bad} needs more")
    tn = phi.breakpoints[n_idx]
    if not np.all(np.isfinite(tn)):
        raise LevelExhaustion("selected breakpoints exceed double range")
    lphi = lvals[n_idx]
    log_sigma_p = -2 * np.log(ks) - lphi
    f = StepFunction(list(zip(log_sigma_p, tn)), -math.inf)
    g = StepFunction(list(zip(log_sigma_p, ks)), 0.0)
    fg = pointwise_product(f, g, "aligned")

    basel = basel_certificate(K)
    harm = harmonic_certificate(K)
    mf = _with_certificate(modular(f, phi), basel)
    mg_val = modular(g, phi)
    mp = _with_certificate(modular(fg, phi), harm)

    # slope bound: phi(t_n + k) >= k phi(t_n) since the slope past t_n is at least phi(t_n)
    slope_lhs = np.asarray(phi.log_value(tn + ks), dtype=float)
    slope_ok = slope_lhs >= np.log(ks) + lphi - 1e-12
    levels = [
        {
            "k": int(k),
            "n_k": int(n) + 1,
            "t_nk": float(t),
            "log_sigma": float(s),
            "log_sigma_prime": float(sp),
            "slope_ok": bool(ok),
        }
        for k, n, t, s, sp, ok in zip(ks, n_idx, tn, log_sigma, log_sigma_p, slope_ok)
    ]
    narrative = [
        "phi(t_{n_k}) |sigma'_k| = 1/k^2, so J(f) is the partial sum of 1/k^2",
        "log|g| >= k on sigma'_k and phi(t + k) >= k phi(t) past a breakpoint, so J(fg) >= H_K",
    ]
    return CounterexampleReport(
        f,
        g,
        mf,
        mg_val,
        mp,
        levels,
        narrative,
        harm.lower_bound,
        {"K": K, "slope_inequality_holds": bool(np.all(slope_ok)), "gamma_exp": phi.gamma_exp},
    )


def _tower_sqrt_eps(n: int) -> TowerScalar:
    """sqrt(u) * eps(u) at u = e_n, with eps(e_n) = n."""
    u = e_tower(n)
    # ln(sqrt(u) eps) = ln(u)/2 + ln(n)
    return u.log().scale(0.5).shift(math.log(n)).exp()


def thm42_inclusion_check(k: int, n_range) -> dict:
    """Tower-scale checks for gamma(t) = sqrt(t) eps(t), eps(e_n) = n, against exp(sqrt t)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    ns = sorted(int(n) for n in n_range)
    if ns and ns[-1] > 8:
        raise OverflowError("tower indices are limited to 8")
    phi = ExpPow(0.5)
    gamma = SqrtEps()
    rows = []
    for n in ns:
        eps = float(n)
        u = e_tower(n)
        x = u.to_float()
        if math.isfinite(x) and x >= 1.0:
            g = float(gamma.value(x))
            exponent = float(phi.log_ratio(x, g))
            mode = "direct"
        else:
            # sqrt(t + sqrt(t) eps) - sqrt(t) = (eps/2)(1 - r) with 0 <= r <= eps/(4 sqrt t);
            # ln sqrt(t) = e_{n-1}/2 makes r underflow.
            log_sqrt_t = u.log().to_float() / 2
            r = math.exp(math.log(eps / 4) - log_sqrt_t) if math.isfinite(log_sqrt_t) else 0.0
            exponent = eps / 2 * (1 - r)
            mode = "asymptotic"
        lhs = iterated(k, "log", _tower_sqrt_eps(n)) if n >= 1 else None
        rhs = TowerScalar.from_float(eps)
        cmp = tower_compare(lhs, rhs)
        rows.append(
            {
                "n": n,
                "eps": eps,
                "ratio_exponent": exponent,
                "exponent_mode": mode,
                "lhs_level": lhs.level,
                "lhs_mantissa_log": lhs.mantissa_log,
                "inclusion_holds": cmp >= 0,
            }
        )
    n0 = None
    for row in reversed(rows):
        if row["inclusion_holds"]:
            n0 = row["n"]
        else:
            break
    return {
        "k": k,
        "rows": rows,
        "n0": n0,
        "eps_at_e3": eps_tower_slope(e_tower(3).to_float()),
        "non_admissible": all(r["ratio_exponent"] > 0.9 * r["n"] / 2 for r in rows),
    }


def thm32_envelope(phi: DefiningFunction, eta: float) -> ProfileFunction:
    """E(t) = phi^{-1}(e/t) - phi^{-1}(w(t)); a multiplier must satisfy log|g| <= E."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    inv = np.vectorize(lambda y: phi.invert_log(float(y)), otypes=[float])

    def envelope(t):
        t = np.asarray(t, dtype=float)
        out = inv(1.0 - np.log(t)) - inv(_log_w(t, eta))
        return float(out) if out.ndim == 0 else out

    return ProfileFunction("envelope", envelope, {"eta": eta, "phi": describe(phi)}, monotone=False)


def envelope_compliance(envelope: ProfileFunction, g: StepFunction, samples: int = 16) -> dict:
    """First arc of the decreasing rearrangement of g where log|g| exceeds the envelope."""
    r = rearrange_decreasing(g)
    lm, lv = r.explicit_arcs()
    edges = np.concatenate([[0.0], np.cumsum(np.exp(lm))])
    for i, v in enumerate(lv):
        a, b = edges[i], min(edges[i + 1], 1.0)
        if b <= 0:
            continue
        ts = np.geomspace(max(a, b * 1e-12), b, samples) if a == 0 else np.linspace(a, b, samples)
        ts = ts[ts > 0]
        env = np.asarray(envelope(ts), dtype=float)
        bad = np.nonzero(v > env + 1e-12 * np.maximum(1.0, np.abs(env)))[0]
        if len(bad):
            return {"compliant": False, "arc": i, "t": float(ts[bad[0]]), "log_g": float(v), "envelope": float(env[bad[0]])}
    return {"compliant": True, "arc": None}
