"""Minimal SVG line plots (polylines, optional log axes).  Convenience output only."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT, PAD = 640, 400, 56
COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _scale(values, log):
    vals = [math.log10(v) if log else v for v in values if (v > 0 or not log) and math.isfinite(v)]
    lo, hi = (min(vals), max(vals)) if vals else (0.0, 1.0)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def line_plot(series, *, title="", xlabel="", ylabel="", logx=False, logy=False) -> str:
    """``series`` maps a label to ``(xs, ys)``; returns the SVG document as a string."""
    xs_all = [x for xs, _ in series.values() for x in xs]
    ys_all = [y for _, ys in series.values() for y in ys]
    x0, x1 = _scale(xs_all, logx)
    y0, y1 = _scale(ys_all, logy)

    def px(x):
        t = math.log10(x) if logx else x
        return PAD + (t - x0) / (x1 - x0) * (WIDTH - 2 * PAD)

    def py(y):
        t = math.log10(y) if logy else y
        return HEIGHT - PAD - (t - y0) / (y1 - y0) * (HEIGHT - 2 * PAD)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{PAD / 2}" text-anchor="middle">{escape(title)}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" transform="rotate(-90 14 {HEIGHT / 2})" '
        f'text-anchor="middle">{escape(ylabel)}</text>',
    ]
    for i, (label, (xs, ys)) in enumerate(series.items()):
        pts = [(px(x), py(y)) for x, y in zip(xs, ys)
               if math.isfinite(x) and math.isfinite(y) and (x > 0 or not logx) and (y > 0 or not logy)]
        colour = COLOURS[i % len(COLOURS)]
        path = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
        parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{path}"/>')
        parts.append(f'<text x="{WIDTH - PAD - 4}" y="{PAD + 16 * (i + 1)}" text-anchor="end" '
                     f'fill="{colour}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
