"""Command-line experiment runner.

Usage:
    orlicz check-admissible --phi 'exp_pow(alpha=0.5)' --gamma 'power(C=1,p=0.5)' --t-max 1e8
    orlicz counterexample prop34 --phi 'exp_pow(alpha=0.5)' --gamma 'power(C=1,p=0.6)' --n 10000
    orlicz staircase --gamma-exp 1.5 --n 500 --beta 2
    orlicz interp-demo --q 0.5 --n 40 --psi 'exp_exp(alpha=0.5)'
    orlicz calderon --seed 0 --cases 200

A negative mathematical verdict still exits 0; only operational failures
(bad specs, search failures, I/O) exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import admissibility as adm
from . import boundary as bnd
from . import counterexamples as cex
from . import defining as dfn
from . import disk
from .errors import OrliczError
from .numerics import Grid
from .reports import ReportDocument, emit
from .specs import parse_gamma, parse_phi

COMMANDS = (
    "check-admissible",
    "check-nabla",
    "compose-psi",
    "staircase",
    "counterexample",
    "envelope",
    "modular",
    "luxemburg",
    "outer",
    "interp-demo",
    "calderon",
)

# accepted knobs per command; anything else is rejected
KNOBS = {
    "check-admissible": {"phi", "gamma", "t_min", "t_max", "grid"},
    "check-nabla": {"phi", "gamma", "eps", "t_min", "t_max", "grid"},
    "compose-psi": {"phi", "gamma", "t", "n"},
    "staircase": {"gamma_exp", "n", "beta", "save"},
    "counterexample": {"kind", "phi", "gamma", "n", "gamma_exp", "n_stair", "k", "tower_k", "n_range"},
    "envelope": {"phi", "eta", "eps", "t"},
    "modular": {"phi", "f", "extremal_eta"},
    "luxemburg": {"phi", "f", "tol"},
    "outer": {"f", "z"},
    "interp-demo": {"q", "n", "psi", "d_cap"},
    "calderon": {"cases", "seed"},
}


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        unknown = set(self.params) - KNOBS[self.command]
        if unknown:
            raise ValueError(f"unknown keys for {self.command}: {sorted(unknown)}")

    def echo(self) -> dict:
        return {"command": self.command, "seed": self.seed, **{k: v for k, v in sorted(self.params.items())}}


def _grid(spec: str, t_min: float, t_max: float) -> Grid:
    kind, _, n = spec.partition(":")
    n = int(n or 200)
    if n < 3:
        raise ValueError("a grid needs at least 3 points")
    if kind == "geometric":
        return Grid.geometric(t_min, t_max, n)
    if kind == "linear":
        return Grid.linear(t_min, t_max, n)
    raise ValueError(f"unknown grid kind {kind!r}")


def _figure(name, samples, x_label, y_label, x_log=True):
    return {"x_label": x_label, "y_label": y_label, "x_log": x_log, "series": [{"name": name, "points": [list(p) for p in samples]}]}


def _read_step(path: str):
    data = json.loads(Path(path).read_text())
    arcs = data.get("arcs", [])
    if arcs and "start" in arcs[0]:
        return bnd.PositionedStepFunction(
            tuple((a["start"], a["length"], a["log_value"]) for a in arcs),
            data.get("remainder_log_value", 0.0),
        )
    return bnd.StepFunction.from_dict(data)


# -- command handlers -------------------------------------------------------------


def _check_admissible(p, seed):
    phi, gamma = parse_phi(p["phi"]), parse_gamma(p["gamma"])
    rep = adm.check_tilde_delta(phi, gamma, _grid(p.get("grid", "geometric:200"), p.get("t_min", 1.0), p["t_max"]))
    d = rep.to_dict()
    samples = d.pop("ratio_samples")
    return ReportDocument(
        "check-admissible",
        {},
        {"tilde_delta": d},
        {"samples": [{"t": t, "log_ratio": r} for t, r in samples]},
        _figure("ln phi(t+gamma)/phi(t)", samples, "t", "log ratio"),
        "samples",
    )


def _check_nabla(p, seed):
    phi, gamma = parse_phi(p["phi"]), parse_gamma(p["gamma"])
    grid = _grid(p.get("grid", "geometric:200"), p.get("t_min", 1e4), p["t_max"])
    rep = adm.check_tilde_nabla(phi, gamma, p["eps"], grid)
    d = rep.to_dict()
    margins = d.pop("margins")
    d.pop("ratio_samples")
    return ReportDocument(
        "check-nabla",
        {},
        {"tilde_nabla": d},
        {"margins": [{"s": s, "margin": m} for s, m in margins]},
        _figure("margin", margins, "s", "ln ratio - (1+eps) ln ln phi"),
        "margins",
    )


def _compose_psi(p, seed):
    phi, gamma = parse_phi(p["phi"]), parse_gamma(p["gamma"])
    psi = adm.compose_psi(phi, gamma).dilated(p.get("n", 1)) if p.get("n", 1) > 1 else adm.compose_psi(phi, gamma)
    ts = p.get("t", [1.0, 10.0, 100.0])
    rows = [{"t": t, "log_psi": float(psi.log_value(t))} for t in ts]
    return ReportDocument("compose-psi", {}, {"psi": psi.render()}, {"values": rows}, None, "values")


def _staircase(p, seed):
    phi = dfn.build_staircase_phi(p["gamma_exp"], p["n"])
    dom = dfn.staircase_domination(phi, p["beta"])
    if p.get("save"):
        Path(p["save"]).write_text(phi.to_json())
    sums = [math.fsum(k ** p["gamma_exp"] for k in range(1, n)) for n in range(1, len(phi) + 1)]
    rel = max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(phi.log_values, sums))
    rows = [
        {"n": i + 1, "log_t_n": float(lt), "log_phi_t_n": float(lv)}
        for i, (lt, lv) in enumerate(zip(phi.log_breakpoints, phi.log_values))
    ]
    verdicts = {
        "n0": dom["n0"],
        "beta": p["beta"],
        "max_rel_error_partial_sums": rel,
        "slopes_nondecreasing": bool(np.all(np.diff(phi.log_values) > 0)),
    }
    fig = _figure("ln phi(t_n)", [(r["n"], r["log_phi_t_n"]) for r in rows], "n", "ln phi(t_n)", False)
    return ReportDocument("staircase", {}, verdicts, {"levels": rows}, fig, "levels")


def _counterexample(p, seed):
    kind = p["kind"]
    if kind == "prop34":
        rep = cex.prop34_build(parse_phi(p["phi"]), parse_gamma(p["gamma"]), p["n"])
    elif kind == "thm43":
        phi = dfn.build_staircase_phi(p.get("gamma_exp", 1.5), p.get("n_stair", 500))
        rep = cex.thm43_refute(phi, p["k"])
    elif kind == "thm42":
        res = cex.thm42_inclusion_check(p.get("tower_k", 2), p.get("n_range", [4, 5, 6]))
        rows = res.pop("rows")
        return ReportDocument("counterexample", {}, {"thm42": res}, {"towers": rows}, None, "towers")
    else:
        raise ValueError(f"unknown counterexample {kind!r}")
    d = rep.to_dict()
    levels = d.pop("levels")
    fig = _figure(
        "partial J(fg)",
        [(r.get("n", r.get("k")), r.get("partial_product", 0.0)) for r in levels],
        "level",
        "partial sum",
        False,
    ) if kind == "prop34" else None
    return ReportDocument("counterexample", {}, {kind: d}, {"levels": levels}, fig, "levels")


def _envelope(p, seed):
    phi = parse_phi(p["phi"])
    eta = p["eta"]
    env = cex.thm32_envelope(phi, eta)
    ts = p.get("t", [1e-9, 1e-6, 1e-3, 0.1, 0.5, 1.0])
    rows = [{"t": t, "envelope": float(env(t))} for t in ts]
    verdicts = {"eta": eta}
    if p.get("eps") is not None:
        verdicts["threshold"] = bnd.nabla_threshold(eta, p["eps"])
    w, f = bnd.thm32_extremal(phi, eta)
    mv = bnd.modular(f, phi)
    verdicts["extremal_modular"] = mv.to_dict()
    verdicts["extremal_modular_exact"] = math.e / eta
    return ReportDocument("envelope", {}, verdicts, {"envelope": rows}, _figure("E(t)", [(r["t"], r["envelope"]) for r in rows], "t", "E"), "envelope")


def _modular(p, seed):
    phi = parse_phi(p["phi"])
    if p.get("extremal_eta") is not None:
        _, f = bnd.thm32_extremal(phi, p["extremal_eta"])
    else:
        f = _read_step(p["f"])
    mv = bnd.modular(f, phi)
    row = {"value": mv.value.value, "log_value": mv.value.log_value, "error_bound": mv.error_bound}
    return ReportDocument("modular", {}, {"modular": mv.to_dict()}, {"modular": [row]}, None)


def _luxemburg(p, seed):
    phi = parse_phi(p["phi"])
    f = _read_step(p["f"])
    if isinstance(f, bnd.PositionedStepFunction):
        f = f.to_step()
    val = bnd.luxemburg(f, phi, p.get("tol", 1e-12))
    verdicts = {"luxemburg": val, "note": "a norm only when the capital function is convex"}
    return ReportDocument("luxemburg", {}, verdicts, {"luxemburg": [{"luxemburg": val}]}, None)


def _outer(p, seed):
    f = _read_step(p["f"])
    if isinstance(f, bnd.StepFunction):
        f = bnd.PositionedStepFunction.place(f)
    rows = []
    for zs in p.get("z", ["0"]):
        z = complex(zs.replace(" ", ""))
        lf = bnd.outer_eval(f, z)
        rows.append({"z_re": z.real, "z_im": z.imag, "log_re": lf.real, "log_im": lf.imag})
    return ReportDocument("outer", {}, {"points": len(rows)}, {"values": rows}, None, "values")


def interp_demo(q: float, n: int, psi_spec: str, d_cap: float = 0.5) -> ReportDocument:
    """Carleson Lambda_1, targets gamma_n, paired Lambda_2 and the worst-case trace sum."""
    psi = parse_phi(psi_spec)
    lam1 = disk.radial_carleson(q, n)
    delta_n = disk.carleson_constant(lam1)
    delta_half = disk.carleson_constant(disk.radial_carleson(q, max(1, n // 2)))
    g_unit, _ = disk.blaschke_weights(lam1)
    # scale so that the first target already allows separation d_cap
    cap1 = math.exp(float(psi.log_value(math.log(1.0 + 2.0 / d_cap))))
    scale = cap1 / g_unit[0]
    gamma, wrep = disk.blaschke_weights(lam1, scale)
    pair = disk.pair_with_targets(lam1, psi, gamma)
    mv, info = disk.trace_sum(pair, psi, worst_case=True, gamma=gamma)
    d = np.array(pair.separations)
    key = [float(psi.log_value(math.log(1.0 + 2.0 / x))) - math.log(g) for x, g in zip(d, gamma)]
    union_delta = disk.carleson_constant(pair.union())
    rows = [
        {
            "n": i + 1,
            "r1_co": p1.co_radius,
            "r2_co": p2.co_radius,
            "d_n": float(dn),
            "gamma_n": float(g),
            "term_n": math.exp(lt),
        }
        for i, (p1, p2, dn, g, lt) in enumerate(zip(pair.lambda1, pair.lambda2, d, gamma, info["log_terms"]))
    ]
    verdicts = {
        "carleson_lambda1": delta_n,
        "carleson_lambda1_half": delta_half,
        "carleson_stability": abs(delta_n - delta_half),
        "min_separation": float(d.min()),
        "separations_nonincreasing": bool(np.all(np.diff(d) <= 0)),
        "key_inequality_max_log_gap": max(key),
        "key_inequality_holds": bool(max(key) <= 1e-9),
        "worst_case_trace_sum": mv.value.value,
        "weighted_target_sum": wrep["sum_w_gamma"],
        "telescoping_bound": wrep["telescoping_bound"],
        "trace_margin": info["margin"],
        "carleson_union": union_delta,
        "union_below_min_separation": bool(union_delta <= d.min()),
        "gamma_scale": scale,
    }
    fig = _figure("d_n", [(r["n"], r["d_n"]) for r in rows], "n", "separation", False)
    return ReportDocument("interp-demo", {}, verdicts, {"pairs": rows}, fig, "pairs")


def _interp(p, seed):
    return interp_demo(p.get("q", 0.5), p.get("n", 40), p.get("psi", "exp_exp(alpha=0.5)"), p.get("d_cap", 0.5))


def random_weighted(rng: np.random.Generator, n: int) -> disk.WeightedSequence:
    vals = rng.normal(0, 2, size=n) * rng.choice([1.0, 0.1, 10.0], size=n)
    # a few ties so that merged rearrangement pieces get exercised
    if n > 3:
        vals[rng.integers(0, n)] = vals[0]
    w = rng.uniform(0.01, 1.0, size=n)
    return disk.WeightedSequence(tuple(vals), tuple(w))


def calderon_run(cases: int, seed: int) -> ReportDocument:
    rng = np.random.default_rng(seed)
    rows = []
    worst_identity = 0.0
    all_exact = all_clip = True
    for case in range(cases):
        a = random_weighted(rng, int(rng.integers(1, 30)))
        r = disk.weighted_rearrangement(a)
        v = np.array(a.values)
        for s in r.breakpoints:
            b, c, info = disk.calderon_split(a, float(s))
            bv, cv = np.array(b.values), np.array(c.values)
            exact = bool(np.all(bv + cv == v))
            clip = bool(np.all(np.abs(cv) <= info["level"]))
            err = abs(info["b_norm"] - info["identity_rhs"]) / max(1.0, abs(info["identity_rhs"]))
            all_exact &= exact
            all_clip &= clip
            worst_identity = max(worst_identity, err)
        rows.append({"case": case, "n": len(v), "breakpoints": len(r.breakpoints)})
    verdicts = {
        "reconstruction_exact": all_exact,
        "clip_bound_holds": all_clip,
        "max_norm_identity_error": worst_identity,
        "cases": cases,
    }
    return ReportDocument("calderon", {}, verdicts, {"cases": rows}, None, "cases")


def _calderon(p, seed):
    return calderon_run(p.get("cases", 200), p.get("seed", seed))


HANDLERS = {
    "check-admissible": _check_admissible,
    "check-nabla": _check_nabla,
    "compose-psi": _compose_psi,
    "staircase": _staircase,
    "counterexample": _counterexample,
    "envelope": _envelope,
    "modular": _modular,
    "luxemburg": _luxemburg,
    "outer": _outer,
    "interp-demo": _interp,
    "calderon": _calderon,
}


def run_experiment(config: ExperimentConfig) -> ReportDocument:
    doc = HANDLERS[config.command](config.params, config.seed)
    doc.config = config.echo()
    return doc


# -- argument parsing ------------------------------------------------------------------


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def _unit_interval(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv", "svg"], default="json")
    common.add_argument("--plot", help="also write an SVG line plot to this path")
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="orlicz", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-admissible", parents=[common])
    s.add_argument("--phi", required=True)
    s.add_argument("--gamma", required=True)
    s.add_argument("--t-min", type=_positive(float), default=1.0)
    s.add_argument("--t-max", type=_positive(float), default=1e8)
    s.add_argument("--grid", default="geometric:200")

    s = sub.add_parser("check-nabla", parents=[common])
    s.add_argument("--phi", required=True)
    s.add_argument("--gamma", required=True)
    s.add_argument("--eps", type=_positive(float), required=True)
    s.add_argument("--t-min", type=_positive(float), default=1e4)
    s.add_argument("--t-max", type=_positive(float), default=1e8)
    s.add_argument("--grid", default="geometric:200")

    s = sub.add_parser("compose-psi", parents=[common])
    s.add_argument("--phi", required=True)
    s.add_argument("--gamma", required=True)
    s.add_argument("--t", type=float, nargs="+", default=[1.0, 10.0, 100.0])
    s.add_argument("--n", type=_positive(int), default=1)

    s = sub.add_parser("staircase", parents=[common])
    s.add_argument("--gamma-exp", type=_positive(float), required=True)
    s.add_argument("--n", type=_positive(int), required=True)
    s.add_argument("--beta", type=float, default=2.0)
    s.add_argument("--save", help="write the staircase as JSON for file:@ specs")

    s = sub.add_parser("counterexample", parents=[common])
    s.add_argument("kind", choices=["prop34", "thm43", "thm42"])
    s.add_argument("--phi", default="exp_pow(alpha=0.5)")
    s.add_argument("--gamma", default="power(C=1,p=0.6)")
    s.add_argument("--n", type=_positive(int), default=10_000)
    s.add_argument("--gamma-exp", type=_positive(float), default=1.5)
    s.add_argument("--n-stair", type=_positive(int), default=500)
    s.add_argument("--k", type=_positive(int), default=100)
    s.add_argument("--tower-k", type=int, default=2)
    s.add_argument("--n-range", default="4,5,6")

    s = sub.add_parser("envelope", parents=[common])
    s.add_argument("--phi", required=True)
    s.add_argument("--eta", type=_positive(float), required=True)
    s.add_argument("--eps", type=_positive(float))
    s.add_argument("--t", type=_unit_or_one, nargs="+")

    s = sub.add_parser("modular", parents=[common])
    s.add_argument("--phi", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--f", help="step function JSON")
    g.add_argument("--extremal-eta", type=_positive(float))

    s = sub.add_parser("luxemburg", parents=[common])
    s.add_argument("--phi", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--tol", type=_positive(float), default=1e-12)

    s = sub.add_parser("outer", parents=[common])
    s.add_argument("--f", required=True)
    s.add_argument("--z", nargs="+", default=["0"])

    s = sub.add_parser("interp-demo", parents=[common])
    s.add_argument("--q", type=_unit_interval, default=0.5)
    s.add_argument("--n", type=_positive(int), default=40)
    s.add_argument("--psi", default="exp_exp(alpha=0.5)")
    s.add_argument("--d-cap", type=_unit_interval, default=0.5)

    s = sub.add_parser("calderon", parents=[common])
    s.add_argument("--cases", type=_positive(int), default=200)
    return ap


def _unit_or_one(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"t must lie in (0, 1], got {text}")
    return v


_GLOBAL = {"out", "format", "plot", "seed", "command"}


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    params = {k: v for k, v in vars(ns).items() if k not in _GLOBAL and v is not None}
    if ns.command == "counterexample":
        params["n_range"] = [int(x) for x in str(params["n_range"]).split(",") if x]
        keep = {"prop34": {"phi", "gamma", "n"}, "thm43": {"gamma_exp", "n_stair", "k"}, "thm42": {"tower_k", "n_range"}}
        params = {k: v for k, v in params.items() if k == "kind" or k in keep[params["kind"]]}
    if ns.command == "calderon":
        params["seed"] = ns.seed
    return ExperimentConfig(ns.command, params, ns.seed)


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        config = config_from_args(ns)
        report = run_experiment(config)
        text = emit(report, ns.format, ns.out, ns.plot)
    except (OrliczError, ValueError, OSError) as exc:
        print(f"orlicz {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if ns.out is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
