"""Pixel layout: maps data-space elements onto a target canvas.

Text is measured with a deterministic monospace approximation so bounding
boxes never depend on a rendering engine: every glyph advances 0.6 em and a
line occupies 1.2 em. Font sizes scale with the target's smaller dimension so
the same document produces proportionally sized furniture at every scale.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

from chartgen.model import (
    BoundingBox,
    Element,
    LayerKind,
    LayoutError,
)

GLYPH_ADVANCE_RATIO = 0.6
LINE_HEIGHT_RATIO = 1.2
# Baseline sits this far down the line box; used by the SVG writer and its
# round-trip test, so keep the two in sync through this constant.
BASELINE_RATIO = 0.8

MARGIN_FRACTION = 0.08
MARGIN_MIN_PX = 4.0
MARGIN_MAX_PX = 60.0

# Fonts scale with target height: the vertical overlap window between point
# labels then stays constant in data units across sizes, while the horizontal
# window only tightens as the target narrows, so smaller devices never have
# strictly fewer label conflicts than larger ones.
FONT_SCALE = 0.014
FONT_MIN_PX = 5.0
# Cap chosen so tick length + gap + tick-label height always fits a 60 px
# margin: 0.4f + 2 + 0.96f <= 60 for f <= 40 (tick labels run at 0.8f).
FONT_MAX_PX = 40.0
TICK_LABEL_FONT_RATIO = 0.8
AXIS_TITLE_FONT_RATIO = 1.1


@dataclass(frozen=True)
class TextMetrics:
    """Monospace glyph-advance model; widths grow linearly with text length."""

    advance_ratio: float = GLYPH_ADVANCE_RATIO
    line_height_ratio: float = LINE_HEIGHT_RATIO

    def width(self, text: str, font_size: float) -> float:
        return len(text) * self.advance_ratio * font_size

    def height(self, font_size: float) -> float:
        return self.line_height_ratio * font_size

    def measure(self, text: str, font_size: float) -> tuple[float, float]:
        return (self.width(text, font_size), self.height(font_size))

    def baseline_offset(self, font_size: float) -> float:
        return BASELINE_RATIO * self.height(font_size)


DEFAULT_TEXT_MODEL = TextMetrics()


def margin_for(extent: float) -> float:
    return min(MARGIN_MAX_PX, max(MARGIN_MIN_PX, MARGIN_FRACTION * extent))


def base_font_px(target: tuple[float, float]) -> float:
    return min(FONT_MAX_PX, max(FONT_MIN_PX, FONT_SCALE * target[1]))


@dataclass(frozen=True)
class PlotArea:
    """Target canvas minus margins, plus the data->pixel transform."""

    x: float
    y: float
    width: float
    height: float
    x_domain: tuple[float, float]
    y_domain: tuple[float, float]

    @property
    def right(self) -> float:
        return self.x + self.width

    @property
    def bottom(self) -> float:
        return self.y + self.height

    def to_px(self, xd: float, yd: float) -> tuple[float, float]:
        x_lo, x_hi = self.x_domain
        y_lo, y_hi = self.y_domain
        fx = (xd - x_lo) / (x_hi - x_lo) if x_hi > x_lo else 0.5
        fy = (yd - y_lo) / (y_hi - y_lo) if y_hi > y_lo else 0.5
        # y grows downward on screen.
        return (self.x + fx * self.width, self.y + (1.0 - fy) * self.height)


def plot_area_for(
    elements: list[Element], target: tuple[float, float]
) -> PlotArea:
    width, height = target
    if width < 2 or height < 2:
        raise LayoutError(f"target {width:g}x{height:g} is too small to lay out (minimum 2x2)")
    xs: list[float] = []
    ys: list[float] = []
    for e in elements:
        if e.vertices_data is not None:
            xs.extend(p[0] for p in e.vertices_data)
            ys.extend(p[1] for p in e.vertices_data)
    if not xs:
        raise LayoutError("no data line present; cannot derive a data domain")
    mx, my = margin_for(width), margin_for(height)
    if width - 2 * mx <= 0 or height - 2 * my <= 0:
        warnings.warn(
            f"target {width:g}x{height:g} cannot host margins; laying out with zero margins",
            stacklevel=2,
        )
        mx = my = 0.0
    return PlotArea(
        x=mx,
        y=my,
        width=width - 2 * mx,
        height=height - 2 * my,
        x_domain=(min(xs), max(xs)),
        y_domain=(min(ys), max(ys)),
    )


def point_radius(base_font: float) -> float:
    return max(1.5, 0.15 * base_font)


def tick_length(base_font: float) -> float:
    return max(3.0, 0.4 * base_font)


def label_gap(base_font: float) -> float:
    return max(2.0, 0.25 * base_font)


def _clamp_into(bbox: BoundingBox, target: tuple[float, float]) -> BoundingBox:
    x = min(max(bbox.x, 0.0), max(0.0, target[0] - bbox.width))
    y = min(max(bbox.y, 0.0), max(0.0, target[1] - bbox.height))
    return BoundingBox(x, y, bbox.width, bbox.height)


def _polyline_bbox(points: tuple[tuple[float, float], ...]) -> BoundingBox:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return BoundingBox(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


def layout_elements(
    elements: list[Element],
    target: tuple[float, float],
    text_model: TextMetrics = DEFAULT_TEXT_MODEL,
) -> list[Element]:
    """Compute pixel bounding boxes for every element at the target size.

    Deterministic: identical inputs give identical boxes. Labels are placed
    relative to the point they describe; axis furniture hangs off the plot
    margins; polyline boxes are the hull of their vertices.
    """
    plot = plot_area_for(elements, target)
    font = base_font_px(target)
    tick_font = TICK_LABEL_FONT_RATIO * font
    title_font = AXIS_TITLE_FONT_RATIO * font
    r = point_radius(font)
    tick_len = tick_length(font)
    gap = label_gap(font)
    x_axis_y = plot.bottom
    y_axis_x = plot.x

    out: list[Element] = []
    for e in elements:
        if e.layer is LayerKind.DATA_LINE:
            px = tuple(plot.to_px(x, y) for x, y in e.vertices_data or ())
            out.append(replace(e, vertices_px=px, bbox=_polyline_bbox(px)))

        elif e.layer is LayerKind.DATA_POINT:
            cx, cy = plot.to_px(*e.anchor_data)
            out.append(
                replace(
                    e,
                    anchor_px=(cx, cy),
                    bbox=BoundingBox(cx - r, cy - r, 2 * r, 2 * r),
                )
            )

        elif e.layer is LayerKind.POINT_LABEL:
            # Above the point; labels at the x-domain edges grow inward so
            # they stay clear of the axis corners.
            cx, cy = plot.to_px(*e.anchor_data)
            w, h = text_model.measure(e.text or "", font)
            anchor = e.text_anchor or "middle"
            if e.anchor_data[0] == plot.x_domain[0]:
                anchor = "start"
                bbox = BoundingBox(cx, cy - r - gap - h, w, h)
            elif e.anchor_data[0] == plot.x_domain[1]:
                anchor = "end"
                bbox = BoundingBox(cx - w, cy - r - gap - h, w, h)
            else:
                bbox = BoundingBox(cx - w / 2.0, cy - r - gap - h, w, h)
            out.append(
                replace(
                    e,
                    anchor_px=(cx, cy),
                    font_size=font,
                    text_anchor=anchor,
                    bbox=_clamp_into(bbox, target),
                )
            )

        elif e.layer is LayerKind.ANNOTATION:
            # Below the anchor (point labels own the space above it), flipped
            # to the left side in the right half of the plot.
            cx, cy = plot.to_px(*e.anchor_data)
            w, h = text_model.measure(e.text or "", font)
            if cx > plot.x + plot.width / 2.0:
                anchor = "end"
                bbox = BoundingBox(cx - gap - w, cy + r + gap, w, h)
            else:
                anchor = "start"
                bbox = BoundingBox(cx + gap, cy + r + gap, w, h)
            out.append(
                replace(
                    e,
                    anchor_px=(cx, cy),
                    font_size=font,
                    text_anchor=anchor,
                    bbox=_clamp_into(bbox, target),
                )
            )

        elif e.layer is LayerKind.AXIS_LINE:
            if e.axis == "x":
                bbox = BoundingBox(plot.x, x_axis_y, plot.width, 1.0)
            else:
                bbox = BoundingBox(y_axis_x, plot.y, 1.0, plot.height)
            out.append(replace(e, bbox=bbox))

        elif e.layer is LayerKind.TICK_MARK:
            if e.axis == "x":
                tx, _ = plot.to_px(e.tick_value, plot.y_domain[0])
                bbox = BoundingBox(tx - 0.5, x_axis_y, 1.0, tick_len)
            else:
                _, ty = plot.to_px(plot.x_domain[0], e.tick_value)
                bbox = BoundingBox(y_axis_x - tick_len, ty - 0.5, tick_len, 1.0)
            out.append(replace(e, bbox=bbox))

        elif e.layer is LayerKind.TICK_LABEL:
            # Edge labels grow inward; the bottom y label sits above its tick
            # so the axis corner stays free for the first x label.
            w, h = text_model.measure(e.text or "", tick_font)
            anchor = e.text_anchor or "middle"
            if e.axis == "x":
                tx, _ = plot.to_px(e.tick_value, plot.y_domain[0])
                if e.tick_value == plot.x_domain[0]:
                    anchor = "start"
                    bbox = BoundingBox(tx, x_axis_y + tick_len + 2.0, w, h)
                elif e.tick_value == plot.x_domain[1]:
                    anchor = "end"
                    bbox = BoundingBox(tx - w, x_axis_y + tick_len + 2.0, w, h)
                else:
                    anchor = "middle"
                    bbox = BoundingBox(tx - w / 2.0, x_axis_y + tick_len + 2.0, w, h)
            else:
                _, ty = plot.to_px(plot.x_domain[0], e.tick_value)
                anchor = "end"
                if e.tick_value == plot.y_domain[0]:
                    bbox = BoundingBox(y_axis_x - tick_len - 2.0 - w, ty - h, w, h)
                else:
                    bbox = BoundingBox(y_axis_x - tick_len - 2.0 - w, ty - h / 2.0, w, h)
            out.append(
                replace(e, font_size=tick_font, text_anchor=anchor, bbox=_clamp_into(bbox, target))
            )

        elif e.layer is LayerKind.AXIS_TITLE:
            w, h = text_model.measure(e.text or "", title_font)
            if e.axis == "x":
                tick_h = text_model.height(tick_font)
                bbox = BoundingBox(
                    plot.x + plot.width / 2.0 - w / 2.0,
                    x_axis_y + tick_len + 2.0 + tick_h + 2.0,
                    w,
                    h,
                )
            else:
                bbox = BoundingBox(2.0, max(0.0, plot.y - h - 2.0), w, h)
            out.append(replace(e, font_size=title_font, bbox=_clamp_into(bbox, target)))

        elif e.layer is LayerKind.GRIDLINE:
            _, ty = plot.to_px(plot.x_domain[0], e.tick_value)
            out.append(replace(e, bbox=BoundingBox(plot.x, ty - 0.5, plot.width, 1.0)))

        elif e.layer is LayerKind.CHART_TITLE:
            w, h = text_model.measure(e.text or "", title_font)
            bbox = BoundingBox(target[0] / 2.0 - w / 2.0, 2.0, w, h)
            out.append(replace(e, font_size=title_font, bbox=_clamp_into(bbox, target)))

        elif e.layer is LayerKind.REFERENCE_LINE:
            # Only produced by the semantic-transition operator, which places
            # it directly in pixel space; pass through untouched.
            out.append(e)

        else:  # pragma: no cover - enum is closed
            raise AssertionError(f"unhandled layer {e.layer}")

    return out
