"""Report documents and their bit-stable JSON, CSV and SVG renderings."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np
import scipy

from . import __version__

FLOAT_FORMAT = "%.12e"

REPORT_SCHEMA = {
    "type": "object",
    "required": ["metadata", "verdicts", "tables"],
    "additionalProperties": False,
    "properties": {
        "metadata": {
            "type": "object",
            "required": ["command", "config", "versions"],
            "properties": {
                "command": {"type": "string"},
                "config": {"type": "object"},
                "versions": {"type": "object", "additionalProperties": {"type": "string"}},
                "timestamp": {"type": "string"},
            },
        },
        "verdicts": {"type": "object"},
        "tables": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": {"type": "object"}},
        },
        "figure": {
            "type": "object",
            "required": ["series"],
            "properties": {
                "x_label": {"type": "string"},
                "y_label": {"type": "string"},
                "x_log": {"type": "boolean"},
                "series": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["name", "points"],
                        "properties": {
                            "name": {"type": "string"},
                            "points": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
                        },
                    },
                },
            },
        },
    },
}


@dataclass
class ReportDocument:
    command: str
    config: dict
    verdicts: dict
    tables: dict = field(default_factory=dict)
    figure: dict | None = None
    primary_table: str | None = None

    def as_object(self) -> dict:
        meta = {
            "command": self.command,
            "config": self.config,
            "versions": {"orlicz": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        }
        epoch = os.environ.get("SOURCE_DATE_EPOCH")
        if epoch:
            meta["timestamp"] = datetime.fromtimestamp(int(epoch), timezone.utc).isoformat()
        obj = {"metadata": meta, "verdicts": self.verdicts, "tables": self.tables}
        if self.figure is not None:
            obj["figure"] = self.figure
        return _plain(obj)

    def validate(self) -> dict:
        obj = self.as_object()
        jsonschema.validate(obj, REPORT_SCHEMA)
        return obj


def _plain(x):
    """numpy scalars and arrays to builtins, tuples to lists."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return FLOAT_FORMAT % x


def dumps(obj, indent: int = 0) -> str:
    """JSON with sorted keys and fixed float formatting; non-finite floats become strings."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(report: ReportDocument) -> str:
    return dumps(report.validate()) + "\n"


def to_csv(report: ReportDocument, table: str | None = None) -> str:
    name = table or report.primary_table or (next(iter(report.tables)) if report.tables else None)
    if name is None or name not in report.tables:
        raise ValueError("report has no table to export")
    rows = _plain(report.tables[name])
    cols = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([(FLOAT_FORMAT % v) if isinstance(v, float) and math.isfinite(v) else v for v in (row[c] for c in cols)])
    return buf.getvalue()


def to_svg(report: ReportDocument, width: int = 640, height: int = 400) -> str:
    fig = report.figure
    if not fig or not fig.get("series"):
        raise ValueError("report carries no figure data")
    x_log = bool(fig.get("x_log"))
    pts_all = []
    series = []
    for s in fig["series"]:
        pts = [(float(x), float(y)) for x, y in s["points"] if math.isfinite(float(x)) and math.isfinite(float(y))]
        if x_log:
            pts = [(math.log10(x), y) for x, y in pts if x > 0]
        series.append((s["name"], pts))
        pts_all.extend(pts)
    if not pts_all:
        raise ValueError("figure data has no finite points")
    xs = [p[0] for p in pts_all]
    ys = [p[1] for p in pts_all]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1
    m = 50
    sx = lambda x: m + (x - x0) / (x1 - x0) * (width - 2 * m)
    sy = lambda y: height - m - (y - y0) / (y1 - y0) * (height - 2 * m)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{m}" y="{m}" width="{width - 2 * m}" height="{height - 2 * m}" fill="none" stroke="#888"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">{fig.get("x_label", "x")}{" (log10)" if x_log else ""}</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {height / 2:.1f})">{fig.get("y_label", "y")}</text>',
        f'<text x="{m}" y="{height - m + 14}" font-size="10">{x0:.4g}</text>',
        f'<text x="{width - m}" y="{height - m + 14}" font-size="10" text-anchor="end">{x1:.4g}</text>',
        f'<text x="{m - 4}" y="{height - m}" font-size="10" text-anchor="end">{y0:.4g}</text>',
        f'<text x="{m - 4}" y="{m + 4}" font-size="10" text-anchor="end">{y1:.4g}</text>',
    ]
    for i, (name, pts) in enumerate(series):
        c = colors[i % len(colors)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{path}"/>')
        out.append(f'<text x="{width - m - 4}" y="{m + 14 + 14 * i}" font-size="11" text-anchor="end" fill="{c}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit(report: ReportDocument, fmt: str, path: str | Path | None = None, plot: str | Path | None = None) -> str:
    """Render ``report`` in ``fmt``; write to ``path`` when given.  Returns the text."""
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    elif fmt == "svg":
        text = to_svg(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    if plot is not None:
        Path(plot).write_text(to_svg(report))
    return text
