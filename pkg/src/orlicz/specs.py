"""Text specs ``family(key=value,...)`` and ``file:@path`` for functions and gauges."""
from __future__ import annotations

import math
import re
from pathlib import Path

from . import admissibility as adm
from . import defining as dfn
from .errors import RangeError, SpecError

# family -> (constructor, ordered parameter names, integer parameters)
PHI_FAMILIES = {
    "exp_pow": (dfn.ExpPow, ("alpha",), ()),
    "exp_lin": (dfn.ExpLin, ("p",), ()),
    "pow": (dfn.Pow, ("p",), ()),
    "log_pow": (dfn.LogPow, ("alpha",), ()),
    "exp_log_quotient": (dfn.ExpLogQuotient, ("alpha", "delta"), ()),
    "exp_iterlog": (dfn.ExpIterLog, ("j",), ("j",)),
    "exp_exp": (dfn.ExpExp, ("alpha",), ()),
    "staircase": (dfn.build_staircase_phi, ("gamma", "n"), ("n",)),
}

GAMMA_FAMILIES = {
    "power": (adm.Power, ("C", "p"), ()),
    "log_weighted": (adm.LogWeighted, ("alpha", "eta"), ()),
    "iterlog": (adm.IterLog, ("k", "c"), ("k",)),
    "sqrt_eps": (adm.SqrtEps, (), ()),
}

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf")


def _parse_call(text: str):
    pos = 0
    m = _NAME.match(text, pos)
    if not m:
        raise SpecError("expected a family name", pos)
    name = m.group()
    pos = m.end()
    if pos >= len(text) or text[pos] != "(":
        raise SpecError("expected '('", pos)
    pos += 1
    args: dict[str, tuple[float, int, int]] = {}
    if pos < len(text) and text[pos] == ")":
        pos += 1
    else:
        while True:
            while pos < len(text) and text[pos] == " ":
                pos += 1
            km = _NAME.match(text, pos)
            if not km:
                raise SpecError("expected a parameter name", pos)
            key = km.group()
            key_pos = pos
            if key in args:
                raise SpecError(f"duplicate parameter {key!r}", pos)
            pos = km.end()
            if pos >= len(text) or text[pos] != "=":
                raise SpecError("expected '='", pos)
            pos += 1
            vm = _NUMBER.match(text, pos)
            if not vm:
                raise SpecError("expected a number", pos)
            args[key] = (float(vm.group()), key_pos, pos)
            pos = vm.end()
            while pos < len(text) and text[pos] == " ":
                pos += 1
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            if pos < len(text) and text[pos] == ")":
                pos += 1
                break
            raise SpecError("expected ',' or ')'", pos)
    if pos != len(text):
        raise SpecError("trailing characters", pos)
    return name, args


def _build(name: str, args: dict, table: dict, what: str):
    ctor, names, int_names = table[name]
    unknown = [k for k in args if k not in names]
    if unknown:
        raise SpecError(f"unknown parameter {unknown[0]!r} for {name}", args[unknown[0]][1])
    missing = [k for k in names if k not in args]
    if missing:
        raise SpecError(f"missing parameter {missing[0]!r} for {name}")
    values = []
    for k in names:
        v, _, p = args[k]
        if not math.isfinite(v):
            raise RangeError(f"parameter {k} of {name} must be finite")
        if k in int_names:
            if v != int(v):
                raise SpecError(f"parameter {k!r} must be an integer", p)
            v = int(v)
        values.append(v)
    return ctor(*values)


def parse_function_spec(text: str):
    """DefiningFunction or GammaFunction from its spec string."""
    text = text.strip()
    if text.startswith("file:@"):
        path = Path(text[len("file:@"):])
        try:
            return dfn.StaircasePhi.from_json(path.read_text())
        except (OSError, ValueError, KeyError) as exc:
            raise SpecError(f"cannot load staircase from {path}: {exc}") from exc
    name, args = _parse_call(text)
    if name in PHI_FAMILIES:
        return _build(name, args, PHI_FAMILIES, "function")
    if name in GAMMA_FAMILIES:
        return _build(name, args, GAMMA_FAMILIES, "gauge")
    raise SpecError(f"unknown family {name!r}", 0)


def parse_phi(text: str) -> dfn.DefiningFunction:
    obj = parse_function_spec(text)
    if not isinstance(obj, dfn.DefiningFunction):
        raise SpecError(f"{text!r} is a gauge, not a defining function")
    return obj


def parse_gamma(text: str) -> adm.GammaFunction:
    obj = parse_function_spec(text)
    if not isinstance(obj, adm.GammaFunction):
        raise SpecError(f"{text!r} is a defining function, not a gauge")
    return obj


def render(obj) -> str:
    return obj.render()
