"""Minimal deterministic SVG line plots.

Output depends only on the data and labels, so identical inputs give
identical bytes.
"""

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=72, right=24, top=40, bottom=56)
COLORS = ["#1f4e9c", "#c0392b", "#27864a", "#7d3c98", "#b9770e", "#555555"]
DASHES = ["", "6,4", "2,3", "8,3,2,3"]


def _ticks(lo, hi, n=5):
    if hi == lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + step * 1e-9, step)]


def _fmt(v):
    return f"{v:.6g}"


def line_plot(series, path, title="", xlabel="", ylabel=""):
    """Write an SVG with one polyline per ``(label, x, y)`` in ``series``."""
    series = [(label, np.asarray(x, float), np.asarray(y, float)) for label, x, y in series]
    series = [(label, x[np.isfinite(y)], y[np.isfinite(y)]) for label, x, y in series]
    if not series or all(x.size == 0 for _, x, _ in series):
        raise ValueError("nothing to plot")
    xs = np.concatenate([x for _, x, _ in series])
    ys = np.concatenate([y for _, _, y in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(min(ys.min(), 0.0)), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    y1 += 0.05 * (y1 - y0)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN["top"] + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{MARGIN["top"] + ph}" x2="{sx(t):.2f}" y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{MARGIN["top"] + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{sy(t):.2f}" x2="{MARGIN["left"]}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="{HEIGHT - 14}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{MARGIN["top"] + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.2f})">{escape(ylabel)}</text>'
    )
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for k, (label, x, y) in enumerate(series):
        color, dash = COLORS[k % len(COLORS)], DASHES[k % len(DASHES)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash_attr} points="{pts}"/>')
        ly = MARGIN["top"] + 16 + 16 * k
        lx = MARGIN["left"] + pw - 150
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" stroke="{color}" stroke-width="1.6"{dash_attr}/>')
        out.append(f'<text x="{lx + 30}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
    return path
