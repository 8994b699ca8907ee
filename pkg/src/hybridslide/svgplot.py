"""Minimal self-contained SVG line plots of a simulation trace."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return list(np.arange(start, hi + 0.5 * step, step))


def trace_svg(t, series: dict, events=(), width=900, height=420, title="") -> str:
    """SVG document with one polyline per entry of ``series`` versus ``t``.

    ``events`` is a sequence of ``(time, label)`` pairs drawn as tick marks
    along the top of the plot area.
    """
    t = np.asarray(t, dtype=float)
    left, right, top, bottom = 70, 150, 30, 45
    pw, ph = width - left - right, height - top - bottom
    t0, t1 = (float(t[0]), float(t[-1])) if t.size else (0.0, 1.0)
    if t1 <= t0:
        t1 = t0 + 1.0
    vals = [np.asarray(v, dtype=float) for v in series.values()]
    finite = np.concatenate([v[np.isfinite(v)] for v in vals]) if vals else np.array([0.0])
    y0, y1 = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if y1 <= y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(v):
        return left + (v - t0) / (t1 - t0) * pw

    def sy(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{left}" y="{top - 10}" font-size="13">{escape(title)}</text>')
    for v in _ticks(t0, t1):
        out.append(f'<line x1="{sx(v):.2f}" y1="{top + ph}" x2="{sx(v):.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{sx(v):.2f}" y="{top + ph + 16}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(y0, y1):
        out.append(f'<line x1="{left - 4}" y1="{sy(v):.2f}" x2="{left}" y2="{sy(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{sy(v) + 4:.2f}" text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 8}" text-anchor="middle">t [s]</text>')
    for te, label in events:
        if t0 <= te <= t1:
            out.append(f'<line x1="{sx(te):.2f}" y1="{top}" x2="{sx(te):.2f}" y2="{top + 8}" stroke="#555">'
                       f'<title>{escape(label)} t={te:.6g}</title></line>')
    for k, (name, v) in enumerate(zip(series, vals)):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, v) if np.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 14 + 16 * k
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" stroke="{color}"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
