"""Read the tool's own CSV/JSON outputs back and draw them as plain SVG 1.1."""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 78, 150, 40, 52
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")

# columns that are locations or labels, never series
_SKIP = {"argmax_x"}
# x column per known layout; anything else uses the first column
_X_COLUMNS = ("n", "x", "power")


def _number(text) -> float | None:
    if isinstance(text, bool) or text is None:
        return None
    if isinstance(text, (int, float)):
        return float(text)
    try:
        return float(Fraction(str(text).strip()))
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            return None


def _flatten(row: dict) -> dict:
    out = {}
    for key, value in row.items():
        if isinstance(value, list):
            for i, v in enumerate(value):
                out[f"c{i}" if key == "coefficients" else f"{key}{i}"] = v
        else:
            out[key] = value
    return out


def _from_records(records: list[dict]) -> tuple[list[str], list[list[float | None]]]:
    flat = [_flatten(r) for r in records]
    columns: list[str] = []
    for r in flat:
        for k in r:
            if k not in columns:
                columns.append(k)
    columns = [c for c in columns if any(_number(r.get(c)) is not None for r in flat)]
    return columns, [[_number(r.get(c)) for c in columns] for r in flat]


def load_table(path: str | Path) -> tuple[list[str], list[list[float | None]]]:
    """Numeric columns and rows from any CSV or JSON this package writes.

    Errata JSON (a list of identity reports) becomes ``n`` against the number
    of residual coefficients, which is zero exactly when an identity holds.
    """
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        data = json.loads(text)
        if isinstance(data, list):
            records = [
                {"n": r.get("n"), "residual_terms": len(r.get("residual_coefficients", []))}
                for r in data
                if r.get("n") is not None
            ]
        elif isinstance(data, dict) and isinstance(data.get("rows"), list):
            records = data["rows"]
        else:
            raise ValueError(f"{path}: no rows to plot")
        columns, rows = _from_records(records)
    else:
        reader = csv.reader(text.splitlines())
        try:
            columns = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows = [[_number(v) for v in line] for line in reader if line]
    if not rows or not columns:
        raise ValueError(f"{path}: no rows to plot")
    return columns, rows


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _fmt(v: float, log: bool) -> str:
    return f"{10.0 ** v:.3g}" if log else f"{v:.4g}"


def render_svg(columns, rows, *, log: bool = False, title: str = "") -> str:
    """A standalone line chart, one polyline per numeric series."""
    xname = next((c for c in _X_COLUMNS if c in columns), columns[0])
    xi = columns.index(xname)
    series = [c for c in columns if c != xname and c not in _SKIP]
    if not series:
        raise ValueError("nothing to plot besides the x column")
    tf = (lambda v: math.log10(v) if v is not None and v > 0 else None) if log else (lambda v: v)

    lines = {}
    for name in series:
        ci = columns.index(name)
        pts = []
        for row in rows:
            if ci >= len(row) or xi >= len(row):
                continue
            x, y = tf(row[xi]), tf(row[ci])
            if x is not None and y is not None and math.isfinite(x) and math.isfinite(y):
                pts.append((x, y))
        lines[name] = pts
    allpts = [p for pts in lines.values() for p in pts]
    if not allpts:
        raise ValueError("no finite points to plot")
    x0, x1 = min(p[0] for p in allpts), max(p[0] for p in allpts)
    y0, y1 = min(p[1] for p in allpts), max(p[1] for p in allpts)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_T + ph - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{MARGIN_T + ph}" x2="{px:.2f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{px:.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="10">{_fmt(t, log)}</text>'
        )
    for t in _ticks(y0, y1):
        py = sy(t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{py:.2f}" x2="{MARGIN_L}" y2="{py:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{MARGIN_L - 8}" y="{py + 3:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="10">{_fmt(t, log)}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{escape(xname)}</text>'
    )
    for i, name in enumerate(series):
        color = COLORS[i % len(COLORS)]
        pts = sorted(lines[name])
        if pts:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = MARGIN_T + 14 + 18 * i
        lx = MARGIN_L + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{lx + 26}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
