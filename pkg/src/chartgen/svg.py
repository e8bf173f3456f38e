"""Deterministic SVG serialization of a generalized chart.

Fixed attribute order, two-decimal coordinates and a stable z-order make the
output byte-identical for identical inputs, which golden-file tests and the
HTTP service rely on.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from chartgen.layout import BASELINE_RATIO
from chartgen.model import Element, LayerKind
from chartgen.pipeline import GeneralizedChart

Z_ORDER: dict[LayerKind, int] = {
    LayerKind.GRIDLINE: 0,
    LayerKind.AXIS_LINE: 1,
    LayerKind.TICK_MARK: 2,
    LayerKind.REFERENCE_LINE: 3,
    LayerKind.DATA_LINE: 4,
    LayerKind.DATA_POINT: 5,
    LayerKind.TICK_LABEL: 6,
    LayerKind.POINT_LABEL: 7,
    LayerKind.ANNOTATION: 8,
    LayerKind.AXIS_TITLE: 9,
    LayerKind.CHART_TITLE: 10,
}

_STROKE: dict[LayerKind, str] = {
    LayerKind.GRIDLINE: "#dddddd",
    LayerKind.AXIS_LINE: "#333333",
    LayerKind.TICK_MARK: "#333333",
    LayerKind.REFERENCE_LINE: "#888888",
    LayerKind.DATA_LINE: "#1f77b4",
}

_TEXT_FILL = "#111111"
_POINT_FILL = "#1f77b4"


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _horizontal(e: Element) -> bool:
    if e.layer is LayerKind.TICK_MARK:
        return e.axis == "y"
    if e.layer is LayerKind.AXIS_LINE:
        return e.axis == "x"
    return True  # gridlines and reference lines run across the plot


def _render_element(e: Element) -> str:
    layer = e.layer
    if layer is LayerKind.DATA_LINE:
        points = e.vertices_px or ()
        d = "M " + " L ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        return f'<path d="{d}" fill="none" stroke="{_STROKE[layer]}" stroke-width="2"/>'

    if layer is LayerKind.DATA_POINT:
        cx, cy = e.bbox.center
        r = e.bbox.width / 2.0
        return f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{_POINT_FILL}"/>'

    if layer in (
        LayerKind.AXIS_LINE,
        LayerKind.TICK_MARK,
        LayerKind.GRIDLINE,
        LayerKind.REFERENCE_LINE,
    ):
        b = e.bbox
        if _horizontal(e):
            x1, x2 = b.x, b.right
            y1 = y2 = b.y + b.height / 2.0
        else:
            x1 = x2 = b.x + b.width / 2.0
            y1, y2 = b.y, b.bottom
        return (
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{_STROKE[layer]}" stroke-width="1"/>'
        )

    # Text layers.
    b = e.bbox
    anchor = e.text_anchor or "start"
    if anchor == "middle":
        x = b.x + b.width / 2.0
    elif anchor == "end":
        x = b.right
    else:
        x = b.x
    y = b.y + BASELINE_RATIO * b.height
    font = e.font_size or 10.0
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{_fmt(font)}" '
        f'font-family="sans-serif" text-anchor="{anchor}" fill="{_TEXT_FILL}">'
        f"{escape(e.text or '')}</text>"
    )


def render(chart: GeneralizedChart) -> str:
    """Serialize the visible elements of a generalized chart to SVG text."""
    width, height = chart.target
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
            f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
        ),
    ]
    visible = [e for e in chart.elements if e.visible and e.bbox is not None]
    visible.sort(key=lambda e: (Z_ORDER[e.layer], e.id))
    lines.extend(_render_element(e) for e in visible)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
