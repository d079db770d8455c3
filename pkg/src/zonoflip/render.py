"""SVG drawings of tilings with their pseudolines."""

from __future__ import annotations

from xml.sax.saxutils import escape

from . import __version__
from .core import render_directions
from .tiling import Tiling, placements_from_signs

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def tile_polygons(t: Tiling, unit: float = 1.0):
    """(bundle pair, four corners) per tile, in placement order."""
    dirs = [(unit * x, unit * y) for x, y in render_directions(t.spec.n)]
    out = []
    for pl in placements_from_signs(t):
        i, j = (b - 1 for b in pl.bundles)
        ox = sum(m * dirs[k][0] for k, m in enumerate(pl.coords))
        oy = sum(m * dirs[k][1] for k, m in enumerate(pl.coords))
        (ax, ay), (bx, by) = dirs[i], dirs[j]
        corners = [(ox, oy), (ox + ax, oy + ay), (ox + ax + bx, oy + ay + by), (ox + bx, oy + by)]
        out.append(((i, j), corners))
    return out


def midline_segments(t: Tiling, unit: float = 1.0):
    """(bundle, segment) pieces; each joins the midpoints of a tile's two edges parallel to that bundle."""
    out = []
    for (i, j), (c0, c1, c2, c3) in tile_polygons(t, unit):
        # edges c0-c1 and c3-c2 are parallel to bundle i, c0-c3 and c1-c2 to j
        mid = lambda p, q: ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)  # noqa: E731
        out.append((i, (mid(c0, c1), mid(c3, c2))))
        out.append((j, (mid(c0, c3), mid(c1, c2))))
    return out


def to_svg(t: Tiling, unit: float = 40.0, pseudolines: bool = True, title: str | None = None) -> str:
    polys = tile_polygons(t, unit)
    xs = [x for _, cs in polys for x, _ in cs] or [0.0]
    ys = [y for _, cs in polys for _, y in cs] or [0.0]
    pad = unit / 2
    x0, y1 = min(xs) - pad, max(ys) + pad
    width, height = max(xs) - min(xs) + 2 * pad, max(ys) - min(ys) + 2 * pad

    def pt(p):
        # flip y so that the zonotope's bottom vertex is at the bottom
        return f"{_fmt(p[0] - x0)},{_fmt(y1 - p[1])}"

    head = title or f"tiling of zonotope {t.spec}"
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f"<title>{escape(head)}</title>",
        f"<desc>zonoflip {__version__}</desc>",
        '<g fill="#f4f1e8" stroke="#333" stroke-width="1">',
    ]
    for _, cs in polys:
        lines.append(f'<polygon points="{" ".join(pt(c) for c in cs)}"/>')
    lines.append("</g>")
    if pseudolines:
        lines.append('<g stroke-width="2" stroke-linecap="round">')
        for b, (p, q) in midline_segments(t, unit):
            x1, y1_ = pt(p).split(",")
            x2, y2 = pt(q).split(",")
            color = PALETTE[b % len(PALETTE)]
            lines.append(f'<line x1="{x1}" y1="{y1_}" x2="{x2}" y2="{y2}" stroke="{color}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
