"""Minimal deterministic SVG output for overlaid polygons."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping
from xml.sax.saxutils import escape

from .polytope import RatPolygon

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
_DASHES = ("", "6,4", "2,3", "8,3,2,3", "1,2")


def polygons_svg(polys: Mapping[str, RatPolygon], width: int = 480, height: int = 360) -> str:
    """Polylines in one coordinate frame, vertices labelled with exact values."""
    margin = 48
    xs = [x for P in polys.values() for x, _ in P.vertices] or [Fraction(1)]
    ys = [y for P in polys.values() for _, y in P.vertices] or [Fraction(1)]
    xmax = max(max(xs), Fraction(1))
    ymax = max(max(ys), Fraction(1))

    def sx(x: Fraction) -> str:
        return f"{margin + float(x / xmax) * (width - 2 * margin):.2f}"

    def sy(y: Fraction) -> str:
        return f"{height - margin - float(y / ymax) * (height - 2 * margin):.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{margin}" y2="{margin}" stroke="black"/>',
    ]
    for idx, (name, P) in enumerate(polys.items()):
        color = _COLORS[idx % len(_COLORS)]
        dash = _DASHES[idx % len(_DASHES)]
        pts = " ".join(f"{sx(x)},{sy(y)}" for x, y in P.vertices)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{dash_attr}/>')
        for x, y in P.vertices:
            out.append(f'<circle cx="{sx(x)}" cy="{sy(y)}" r="3" fill="{color}"/>')
            label = escape(f"({x},{y})")
            dy = -6 - 12 * idx
            out.append(
                f'<text x="{sx(x)}" y="{float(sy(y)) + dy:.2f}" font-size="10" fill="{color}">{label}</text>')
        out.append(
            f'<text x="{width - margin - 90}" y="{margin + 14 * idx}" font-size="12" fill="{color}">'
            f"{escape(name)}</text>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plot(path: str, polys: Mapping[str, RatPolygon]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(polygons_svg(polys))
