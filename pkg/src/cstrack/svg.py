"""Minimal SVG trace overlays.

Coordinates are image pixels with y pointing down, so the plot reads like
the frame itself.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

REFERENCE_COLOR = "#d62728"
COMPARISON_COLOR = "#1f77b4"


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _series(points, color, label, scale, pad):
    runs = [[]]
    for p in points:
        if p is None or any(math.isnan(c) for c in p):
            if runs[-1]:
                runs.append([])
            continue
        runs[-1].append(p)
    out = [f'<g class="series" data-label="{escape(label)}" stroke="{color}" fill="{color}">']
    for run in runs:
        if len(run) > 1:
            coords = " ".join(f"{_fmt(pad + x * scale)},{_fmt(pad + y * scale)}" for x, y in run)
            out.append(f'<polyline points="{coords}" fill="none" stroke-width="1"/>')
        for x, y in run:
            out.append(f'<circle cx="{_fmt(pad + x * scale)}" cy="{_fmt(pad + y * scale)}" r="2.5" stroke="none"/>')
    out.append("</g>")
    return out


def overlay_svg(width, height, reference, comparison, title="", labels=("original", "reconstructed")) -> str:
    """Two position series (lists of (x, y) or None) drawn over a frame outline."""
    scale = max(1.0, 480.0 / max(width, height))
    pad = 40
    w = width * scale + 2 * pad
    h = height * scale + 2 * pad + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}" font-family="sans-serif" font-size="11">',
        f"<title>{escape(title)}</title>",
        f'<rect x="{pad}" y="{pad}" width="{_fmt(width * scale)}" height="{_fmt(height * scale)}" '
        'fill="white" stroke="black" stroke-width="1"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        px = frac * (width - 1)
        py = frac * (height - 1)
        parts.append(f'<text x="{_fmt(pad + px * scale)}" y="{pad - 6}" text-anchor="middle">{_fmt(px)}</text>')
        parts.append(f'<text x="{pad - 6}" y="{_fmt(pad + py * scale + 4)}" text-anchor="end">{_fmt(py)}</text>')
    parts += _series(reference, REFERENCE_COLOR, labels[0], scale, pad)
    parts += _series(comparison, COMPARISON_COLOR, labels[1], scale, pad)
    ly = pad + height * scale + 24
    for i, (label, color) in enumerate(zip(labels, (REFERENCE_COLOR, COMPARISON_COLOR))):
        lx = pad + i * 140
        parts.append(f'<circle cx="{lx + 5}" cy="{_fmt(ly - 4)}" r="4" fill="{color}"/>')
        parts.append(f'<text x="{lx + 14}" y="{_fmt(ly)}">{escape(label)}</text>')
    if title:
        parts.append(f'<text x="{_fmt(w / 2)}" y="16" text-anchor="middle" font-size="13">{escape(title)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
