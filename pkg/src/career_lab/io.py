"""CSV, JSON and SVG emitters with stable, golden-file friendly formatting."""

from __future__ import annotations

import csv
import json
import math
from xml.sax.saxutils import escape


def fmt(x) -> str:
    """12 significant digits, '.' separator, no grouping; ints and strings pass through."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    if x is None:
        return ""
    return str(x)


def write_csv(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def svg_line_chart(xs, ys, *, x_label="x", y_label="y", width=640, height=400) -> str:
    """Single-polyline SVG 1.1 chart with axis labels and min/max tick values."""
    pad = 60
    pts = [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n'
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<text x="{width / 2}" y="{height - 15}" text-anchor="middle" font-size="14">{escape(x_label)}</text>\n'
        f'<text x="18" y="{height / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {height / 2})">{escape(y_label)}</text>\n'
    )
    if not pts:
        return head + "</svg>\n"
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    sx = (width - 2 * pad) / (x1 - x0) if x1 > x0 else 0.0
    sy = (height - 2 * pad) / (y1 - y0) if y1 > y0 else 0.0

    def px(x):
        return pad + (x - x0) * sx if sx else width / 2

    def py(y):
        return height - pad - (y - y0) * sy if sy else height / 2

    coords = " ".join(f"{px(x):.3f},{py(y):.3f}" for x, y in pts)
    ticks = (
        f'<text x="{pad}" y="{height - pad + 18}" text-anchor="middle" font-size="11">{fmt(x0)}</text>\n'
        f'<text x="{width - pad}" y="{height - pad + 18}" text-anchor="middle" font-size="11">{fmt(x1)}</text>\n'
        f'<text x="{pad - 6}" y="{height - pad}" text-anchor="end" font-size="11">{fmt(y0)}</text>\n'
        f'<text x="{pad - 6}" y="{pad}" text-anchor="end" font-size="11">{fmt(y1)}</text>\n'
    )
    return head + ticks + f'<polyline fill="none" stroke="steelblue" stroke-width="2" points="{coords}"/>\n</svg>\n'
