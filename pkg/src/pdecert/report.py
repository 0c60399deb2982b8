"""Deterministic CSV/JSON/SVG emitters and the flat config reader."""
from __future__ import annotations

import configparser
import json
import math
import re
from pathlib import Path

from .exceptions import ConfigError

SCHEMA = "v1"


def fmt(x) -> str:
    """17 significant digits, the shortest exact round trip for float64."""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _clean(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def write_json(path: Path, payload: dict):
    body = {"schema": SCHEMA}
    body.update(payload)
    Path(path).write_text(json.dumps(_clean(body), indent=2, sort_keys=True) + "\n")


# config ---------------------------------------------------------------------

_SECTION = "scenario"


def _line_of(text, key):
    pat = re.compile(rf"^\s*{re.escape(key)}\s*[=:]")
    for i, line in enumerate(text.splitlines(), 1):
        if pat.match(line):
            return i
    return None


def _convert(kind, raw, key, line):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return [float(v) for v in raw.replace(",", " ").split()]
        if kind == "strs":
            return [v for v in raw.replace(",", " ").split()]
        return raw.strip()
    except ValueError:
        name = kind if isinstance(kind, str) else kind.__name__
        raise ConfigError(f"{key}: cannot read {raw!r} as {name}", line) from None


def parse_config(text: str, schema: dict) -> dict:
    """Read ``key = value`` lines.  ``schema`` maps key -> (type, default).

    Comments start with '#' or ';'.  Unknown keys are errors.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (n and N differ)
    try:
        parser.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], line - 1 if line else None) from None
    out = {k: v[1] for k, v in schema.items()}
    for key, raw in parser[_SECTION].items():
        line = _line_of(text, key)
        if key not in schema:
            raise ConfigError(f"unknown key {key!r}", line)
        out[key] = _convert(schema[key][0], raw, key, line)
    return out


def load_config(path, schema) -> dict:
    if path is None:
        return {k: v[1] for k, v in schema.items()}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, schema)


# svg ------------------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def line_chart(series: dict, title="", logy=True, width=640, height=400) -> str:
    """Minimal SVG line chart of {label: (times, values)}."""
    pad = 50
    pts = {}
    for label, (ts, vs) in series.items():
        keep = [(float(t), float(v)) for t, v in zip(ts, vs) if (v > 0 or not logy) and math.isfinite(v)]
        if keep:
            pts[label] = [(t, math.log10(v) if logy else v) for t, v in keep]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>']
    if pts:
        xs = [p[0] for v in pts.values() for p in v]
        ys = [p[1] for v in pts.values() for p in v]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        x1 = x1 if x1 > x0 else x0 + 1
        y1 = y1 if y1 > y0 else y0 + 1

        def sx(x):
            return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

        def sy(y):
            return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

        parts.append(f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
                     'fill="none" stroke="black"/>')
        parts.append(f'<text x="{pad}" y="{height - 20}" font-size="10">t={x0:.3g}</text>')
        parts.append(f'<text x="{width - pad}" y="{height - 20}" font-size="10" text-anchor="end">t={x1:.3g}</text>')
        ylab = "log10 " if logy else ""
        parts.append(f'<text x="5" y="{pad}" font-size="10">{ylab}{y1:.3g}</text>')
        parts.append(f'<text x="5" y="{height - pad}" font-size="10">{ylab}{y0:.3g}</text>')
        for i, (label, p) in enumerate(pts.items()):
            color = _COLORS[i % len(_COLORS)]
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in p)
            parts.append(f'<polyline fill="none" stroke="{color}" points="{path}"/>')
            parts.append(f'<text x="{width - pad + 4}" y="{pad + 14 * (i + 1)}" font-size="10" '
                         f'fill="{color}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
