"""Static SVG figures of domains, sketches, spanners and paths."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

from .errors import IoError
from .geometry import PolygonalDomain, PolyPath, SegmentKind

__all__ = ["emit_svg", "render_svg"]

PATH_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"]
KIND_DASH = {SegmentKind.TANGENT: "", SegmentKind.BOUNDARY: "4 2", SegmentKind.CORRIDOR: "1 2"}


def _pts(coords, fy) -> str:
    return " ".join(f"{x:.6g},{fy(y):.6g}" for x, y in coords)


def render_svg(
    domain: PolygonalDomain,
    paths: dict[str, PolyPath] | None = None,
    sketch=None,
    spanner=None,
    points: dict | None = None,
    width: int = 800,
) -> str:
    """SVG text. ``paths`` maps legend labels to polylines."""
    xmin, ymin, xmax, ymax = domain.bounding_rect
    w, h = xmax - xmin, ymax - ymin
    scale = width / w
    height = int(round(h * scale))
    # SVG y grows downwards
    fy = lambda y: ymax + ymin - y  # noqa: E731
    stroke = 1.0 / scale
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height + 20 * (len(paths or {}) + 2)}" '
        f'viewBox="{xmin:.6g} {ymin:.6g} {w:.6g} {h + (20 * (len(paths or {}) + 2)) / scale:.6g}">',
        f'<rect x="{xmin:.6g}" y="{ymin:.6g}" width="{w:.6g}" height="{h:.6g}" fill="white" stroke="black" stroke-width="{stroke:.4g}"/>',
        '<g id="obstacles">',
    ]
    for o in domain.obstacles:
        out.append(f'<polygon points="{_pts(o.coords, fy)}" fill="#bbbbbb" stroke="#555555" stroke-width="{stroke:.4g}"/>')
    out.append("</g>")
    if sketch is not None:
        out.append('<g id="corepolygons">')
        for c in sketch.corepolygons:
            out.append(
                f'<polygon points="{_pts(c.polygon.coords, fy)}" fill="none" stroke="#333399" stroke-width="{stroke:.4g}"/>'
            )
        out.append("</g>")
    if spanner is not None:
        out.append('<g id="spanner" stroke="#99cc99" stroke-opacity="0.6">')
        for e in spanner.edges:
            a, b = spanner.nodes[e.u].location, spanner.nodes[e.v].location
            out.append(
                f'<line x1="{a[0]:.6g}" y1="{fy(a[1]):.6g}" x2="{b[0]:.6g}" y2="{fy(b[1]):.6g}" stroke-width="{0.6 * stroke:.4g}"/>'
            )
        out.append("</g>")
    legend = []
    for i, (label, path) in enumerate((paths or {}).items()):
        color = PATH_COLORS[i % len(PATH_COLORS)]
        out.append(f'<g id="path-{i}" fill="none" stroke="{color}" stroke-width="{2 * stroke:.4g}">')
        for (a, b), kind in zip(path.segments, path.segment_kinds):
            dash = KIND_DASH.get(kind, "")
            dash_attr = f' stroke-dasharray="{" ".join(f"{float(v) * stroke:.4g}" for v in dash.split())}"' if dash else ""
            out.append(f'<line x1="{a[0]:.6g}" y1="{fy(a[1]):.6g}" x2="{b[0]:.6g}" y2="{fy(b[1]):.6g}"{dash_attr}/>')
        out.append("</g>")
        legend.append((color, f"{label}: length {path.length:.6f}"))
    for name, p in (points or {}).items():
        out.append(f'<circle cx="{p[0]:.6g}" cy="{fy(p[1]):.6g}" r="{3 * stroke:.4g}" fill="black"/>')
        out.append(f'<text x="{p[0] + 4 * stroke:.6g}" y="{fy(p[1]):.6g}" font-size="{12 * stroke:.4g}">{escape(str(name))}</text>')
    legend.append(("#bbbbbb", f"obstacles: {len(domain.obstacles)}"))
    if sketch is not None:
        legend.append(("#333399", "corepolygons"))
    out.append('<g id="legend">')
    for i, (color, text) in enumerate(legend):
        y = ymax + (20 * i + 14) / scale
        out.append(f'<rect x="{xmin + 4 * stroke:.6g}" y="{y - 10 * stroke:.6g}" width="{10 * stroke:.4g}" height="{10 * stroke:.4g}" fill="{color}"/>')
        out.append(f'<text x="{xmin + 18 * stroke:.6g}" y="{y:.6g}" font-size="{12 * stroke:.4g}">{escape(text)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(domain: PolygonalDomain, out, paths=None, sketch=None, spanner=None, points=None) -> Path:
    text = render_svg(domain, paths, sketch, spanner, points)
    try:
        path = Path(out)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {out}: {exc}") from exc
    return path
