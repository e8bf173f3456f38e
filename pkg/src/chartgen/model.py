"""Chart document model: parsing, feature classification, importance assignment.

The input format is a declarative JSON document describing one or more data
series plus axes, annotations and the size the chart was authored at. Parsing
produces an immutable :class:`ChartSpec`; :func:`assign_importance` turns the
spec into a flat list of :class:`Element` records carrying semantic weights
but no pixel geometry yet (see :mod:`chartgen.layout` for that step).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any


class ChartSpecError(ValueError):
    """Raised for malformed chart documents; carries the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class LayoutError(ValueError):
    """Raised when a target size cannot host a layout at all."""


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel rectangle, origin at the top-left of the canvas."""

    x: float
    y: float
    width: float
    height: float

    @property
    def right(self) -> float:
        return self.x + self.width

    @property
    def bottom(self) -> float:
        return self.y + self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2.0, self.y + self.height / 2.0)

    @property
    def area(self) -> float:
        return self.width * self.height

    def translated(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(self.x + dx, self.y + dy, self.width, self.height)

    def intersection_area(self, other: "BoundingBox") -> float:
        """Overlap area; 0.0 when the rectangles merely touch."""
        w = min(self.right, other.right) - max(self.x, other.x)
        if w <= 0.0:
            return 0.0
        h = min(self.bottom, other.bottom) - max(self.y, other.y)
        if h <= 0.0:
            return 0.0
        return w * h

    def intersects(self, other: "BoundingBox") -> bool:
        return self.intersection_area(other) > 0.0


class LayerKind(enum.Enum):
    """Category a chart element belongs to; importance defaults key off this."""

    DATA_LINE = "DataLine"
    DATA_POINT = "DataPoint"
    POINT_LABEL = "PointLabel"
    ANNOTATION = "Annotation"
    AXIS_LINE = "AxisLine"
    TICK_MARK = "TickMark"
    TICK_LABEL = "TickLabel"
    AXIS_TITLE = "AxisTitle"
    CHART_TITLE = "ChartTitle"
    GRIDLINE = "Gridline"
    REFERENCE_LINE = "ReferenceLine"


class FeaturePointKind(enum.Enum):
    FIRST = "First"
    LAST = "Last"
    GLOBAL_MAX = "GlobalMax"
    GLOBAL_MIN = "GlobalMin"
    LOCAL_MAX = "LocalMax"
    LOCAL_MIN = "LocalMin"
    INTERMEDIATE = "Intermediate"


# Per-layer semantic weights in [0, 1]. Point labels are refined per feature
# kind below; data points mirror that split at a lower level.
LAYER_IMPORTANCE: dict[LayerKind, float] = {
    LayerKind.DATA_LINE: 1.0,
    LayerKind.ANNOTATION: 0.7,
    LayerKind.CHART_TITLE: 0.65,
    LayerKind.AXIS_LINE: 0.5,
    LayerKind.AXIS_TITLE: 0.45,
    LayerKind.TICK_LABEL: 0.4,
    LayerKind.TICK_MARK: 0.35,
    LayerKind.GRIDLINE: 0.1,
    LayerKind.REFERENCE_LINE: 0.85,
}

POINT_LABEL_IMPORTANCE: dict[FeaturePointKind, float] = {
    FeaturePointKind.FIRST: 0.9,
    FeaturePointKind.LAST: 0.9,
    FeaturePointKind.GLOBAL_MAX: 0.9,
    FeaturePointKind.GLOBAL_MIN: 0.9,
    FeaturePointKind.LOCAL_MAX: 0.75,
    FeaturePointKind.LOCAL_MIN: 0.75,
    FeaturePointKind.INTERMEDIATE: 0.25,
}

DATA_POINT_IMPORTANCE: dict[FeaturePointKind, float] = {
    FeaturePointKind.FIRST: 0.8,
    FeaturePointKind.LAST: 0.8,
    FeaturePointKind.GLOBAL_MAX: 0.8,
    FeaturePointKind.GLOBAL_MIN: 0.8,
    FeaturePointKind.LOCAL_MAX: 0.8,
    FeaturePointKind.LOCAL_MIN: 0.8,
    FeaturePointKind.INTERMEDIATE: 0.6,
}


@dataclass(frozen=True)
class AxisSpec:
    title: str = ""
    kind: str = "linear"  # "linear" | "time" (time = unix epoch seconds)
    tick_count: int | None = None


@dataclass(frozen=True)
class Annotation:
    x: float
    y: float
    text: str
    importance: float | None = None


@dataclass(frozen=True)
class Series:
    name: str
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class ChartSpec:
    series: tuple[Series, ...]
    x_axis: AxisSpec = AxisSpec()
    y_axis: AxisSpec = AxisSpec()
    annotations: tuple[Annotation, ...] = ()
    original_size: tuple[float, float] = (0.0, 0.0)

    def x_domain(self) -> tuple[float, float]:
        xs = [p[0] for s in self.series for p in s.points]
        return (min(xs), max(xs))

    def y_domain(self) -> tuple[float, float]:
        ys = [p[1] for s in self.series for p in s.points]
        return (min(ys), max(ys))


@dataclass(frozen=True)
class Element:
    """One positioned chart primitive.

    Data-space fields (``anchor_data``, ``vertices_data``, ``tick_value``) are
    set when the element is created; pixel-space fields (``bbox``,
    ``anchor_px``, ``vertices_px``, ``font_size``) are filled in by layout.
    """

    id: int
    layer: LayerKind
    importance: float
    visible: bool = True
    bbox: BoundingBox | None = None
    text: str | None = None
    font_size: float | None = None
    text_anchor: str | None = None  # "start" | "middle" | "end"
    anchor_data: tuple[float, float] | None = None
    anchor_px: tuple[float, float] | None = None
    vertices_data: tuple[tuple[float, float], ...] | None = None
    vertices_px: tuple[tuple[float, float], ...] | None = None
    feature_kind: FeaturePointKind | None = None
    series_name: str | None = None
    axis: str | None = None  # "x" | "y" for axis furniture
    tick_value: float | None = None
    flagged_for_elimination: bool = False

    def hidden(self) -> "Element":
        return replace(self, visible=False)


# ---------------------------------------------------------------------------
# Parsing


def _expect_object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ChartSpecError(path, f"expected object, got {type(value).__name__}")
    return value


def _expect_array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ChartSpecError(path, f"expected array, got {type(value).__name__}")
    return value


def _expect_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ChartSpecError(path, f"expected number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise ChartSpecError(path, "expected finite number")
    return float(value)

def _expect_string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ChartSpecError(path, f"expected string, got {type(value).__name__}")
    return value


def _reject_unknown(obj: dict, allowed: set[str], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ChartSpecError(path, f"unknown key {key!r}")


def _parse_axis(obj: Any, path: str) -> AxisSpec:
    obj = _expect_object(obj, path)
    _reject_unknown(obj, {"title", "type", "tickCount"}, path)
    title = _expect_string(obj["title"], f"{path}.title") if "title" in obj else ""
    kind = _expect_string(obj["type"], f"{path}.type") if "type" in obj else "linear"
    if kind not in ("linear", "time"):
        raise ChartSpecError(f"{path}.type", f"expected 'linear' or 'time', got {kind!r}")
    tick_count: int | None = None
    if "tickCount" in obj:
        raw = _expect_number(obj["tickCount"], f"{path}.tickCount")
        if raw != int(raw) or int(raw) < 2:
            raise ChartSpecError(f"{path}.tickCount", "expected integer >= 2")
        tick_count = int(raw)
    return AxisSpec(title=title, kind=kind, tick_count=tick_count)


def parse_chart_spec(document: str | bytes | dict) -> ChartSpec:
    """Parse and validate a chart document (JSON text or an already-loaded dict).

    Raises :class:`ChartSpecError` with a path to the offending field on any
    schema violation, empty series, or non-increasing x values.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ChartSpecError("", f"invalid JSON: {exc.msg} (line {exc.lineno})") from exc
    root = _expect_object(document, "")
    _reject_unknown(root, {"series", "xAxis", "yAxis", "annotations", "originalSize"}, "")

    if "series" not in root:
        raise ChartSpecError("series", "missing required key")
    series_raw = _expect_array(root["series"], "series")
    if not series_raw:
        raise ChartSpecError("series", "at least one series required")
    series: list[Series] = []
    for si, sobj in enumerate(series_raw):
        spath = f"series[{si}]"
        sobj = _expect_object(sobj, spath)
        _reject_unknown(sobj, {"name", "points"}, spath)
        name = _expect_string(sobj["name"], f"{spath}.name") if "name" in sobj else f"series-{si}"
        if "points" not in sobj:
            raise ChartSpecError(f"{spath}.points", "missing required key")
        pts_raw = _expect_array(sobj["points"], f"{spath}.points")
        if len(pts_raw) < 2:
            raise ChartSpecError(f"{spath}.points", "a series needs at least 2 points")
        points: list[tuple[float, float]] = []
        for pi, pobj in enumerate(pts_raw):
            ppath = f"{spath}.points[{pi}]"
            pobj = _expect_object(pobj, ppath)
            _reject_unknown(pobj, {"x", "y"}, ppath)
            for key in ("x", "y"):
                if key not in pobj:
                    raise ChartSpecError(f"{ppath}.{key}", "missing required key")
            x = _expect_number(pobj["x"], f"{ppath}.x")
            y = _expect_number(pobj["y"], f"{ppath}.y")
            if points and x <= points[-1][0]:
                raise ChartSpecError(f"{ppath}.x", "non-increasing x")
            points.append((x, y))
        series.append(Series(name=name, points=tuple(points)))

    x_axis = _parse_axis(root["xAxis"], "xAxis") if "xAxis" in root else AxisSpec()
    y_axis = _parse_axis(root["yAxis"], "yAxis") if "yAxis" in root else AxisSpec()

    if "originalSize" not in root:
        raise ChartSpecError("originalSize", "missing required key")
    size_obj = _expect_object(root["originalSize"], "originalSize")
    _reject_unknown(size_obj, {"width", "height"}, "originalSize")
    for key in ("width", "height"):
        if key not in size_obj:
            raise ChartSpecError(f"originalSize.{key}", "missing required key")
    width = _expect_number(size_obj["width"], "originalSize.width")
    height = _expect_number(size_obj["height"], "originalSize.height")
    if width <= 0 or height <= 0:
        raise ChartSpecError("originalSize", "width and height must be > 0")

    xs = [p[0] for s in series for p in s.points]
    ys = [p[1] for s in series for p in s.points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)

    annotations: list[Annotation] = []
    if "annotations" in root:
        for ai, aobj in enumerate(_expect_array(root["annotations"], "annotations")):
            apath = f"annotations[{ai}]"
            aobj = _expect_object(aobj, apath)
            _reject_unknown(aobj, {"x", "y", "text", "importance"}, apath)
            for key in ("x", "y", "text"):
                if key not in aobj:
                    raise ChartSpecError(f"{apath}.{key}", "missing required key")
            ax = _expect_number(aobj["x"], f"{apath}.x")
            ay = _expect_number(aobj["y"], f"{apath}.y")
            text = _expect_string(aobj["text"], f"{apath}.text")
            if not (x_lo <= ax <= x_hi) or not (y_lo <= ay <= y_hi):
                raise ChartSpecError(apath, "anchor outside the data domain")
            imp: float | None = None
            if "importance" in aobj:
                imp = _expect_number(aobj["importance"], f"{apath}.importance")
                if not (0.0 <= imp <= 1.0):
                    raise ChartSpecError(f"{apath}.importance", "expected value in [0, 1]")
            annotations.append(Annotation(x=ax, y=ay, text=text, importance=imp))

    return ChartSpec(
        series=tuple(series),
        x_axis=x_axis,
        y_axis=y_axis,
        annotations=tuple(annotations),
        original_size=(width, height),
    )


# ---------------------------------------------------------------------------
# Feature classification


def classify_feature_points(series: Series) -> list[FeaturePointKind]:
    """Classify every point of a series.

    Interior points are local extrema only under strict inequality against
    both neighbors (plateaus stay Intermediate). The first occurrence of the
    global max/min overrides a local kind; First/Last override everything.
    """
    ys = [p[1] for p in series.points]
    n = len(ys)
    kinds = [FeaturePointKind.INTERMEDIATE] * n
    for i in range(1, n - 1):
        if ys[i] > ys[i - 1] and ys[i] > ys[i + 1]:
            kinds[i] = FeaturePointKind.LOCAL_MAX
        elif ys[i] < ys[i - 1] and ys[i] < ys[i + 1]:
            kinds[i] = FeaturePointKind.LOCAL_MIN
    kinds[ys.index(max(ys))] = FeaturePointKind.GLOBAL_MAX
    kinds[ys.index(min(ys))] = FeaturePointKind.GLOBAL_MIN
    kinds[0] = FeaturePointKind.FIRST
    kinds[-1] = FeaturePointKind.LAST
    return kinds


# ---------------------------------------------------------------------------
# Number / date formatting for generated label text


def format_value(v: float) -> str:
    """Shortest exact decimal form; round-trips through float()."""
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def format_tick(v: float, axis_kind: str, span: float) -> str:
    if axis_kind == "time":
        dt = datetime.fromtimestamp(v, tz=timezone.utc)
        if span >= 2 * 365.25 * 86400:
            return dt.strftime("%Y")
        if span >= 60 * 86400:
            return dt.strftime("%Y-%m")
        return dt.strftime("%Y-%m-%d")
    return f"{v:g}"


# ---------------------------------------------------------------------------
# Importance assignment

DEFAULT_TICK_COUNT = 5


def _tick_values(axis: AxisSpec, lo: float, hi: float) -> list[float]:
    n = axis.tick_count or DEFAULT_TICK_COUNT
    if hi == lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def assign_importance(spec: ChartSpec) -> list[Element]:
    """Materialize all elements of a chart with semantic importance weights.

    Elements come back in a deterministic creation order (ids are dense,
    starting at 0) and without pixel geometry; run
    :func:`chartgen.layout.layout_elements` to place them at a target size.
    """
    elements: list[Element] = []
    next_id = 0

    def add(**kwargs: Any) -> None:
        nonlocal next_id
        elements.append(Element(id=next_id, **kwargs))
        next_id += 1

    for series in spec.series:
        kinds = classify_feature_points(series)
        add(
            layer=LayerKind.DATA_LINE,
            importance=LAYER_IMPORTANCE[LayerKind.DATA_LINE],
            vertices_data=series.points,
            series_name=series.name,
        )
        for (x, y), kind in zip(series.points, kinds):
            add(
                layer=LayerKind.DATA_POINT,
                importance=DATA_POINT_IMPORTANCE[kind],
                anchor_data=(x, y),
                feature_kind=kind,
                series_name=series.name,
            )
        for (x, y), kind in zip(series.points, kinds):
            add(
                layer=LayerKind.POINT_LABEL,
                importance=POINT_LABEL_IMPORTANCE[kind],
                anchor_data=(x, y),
                feature_kind=kind,
                text=format_value(y),
                text_anchor="middle",
                series_name=series.name,
            )

    for ann in spec.annotations:
        add(
            layer=LayerKind.ANNOTATION,
            importance=ann.importance if ann.importance is not None else LAYER_IMPORTANCE[LayerKind.ANNOTATION],
            anchor_data=(ann.x, ann.y),
            text=ann.text,
            text_anchor="start",
        )

    x_lo, x_hi = spec.x_domain()
    y_lo, y_hi = spec.y_domain()

    # X axis: line, ticks, tick labels, title.
    add(layer=LayerKind.AXIS_LINE, importance=LAYER_IMPORTANCE[LayerKind.AXIS_LINE], axis="x")
    x_span = x_hi - x_lo
    for tv in _tick_values(spec.x_axis, x_lo, x_hi):
        add(layer=LayerKind.TICK_MARK, importance=LAYER_IMPORTANCE[LayerKind.TICK_MARK], axis="x", tick_value=tv)
    for tv in _tick_values(spec.x_axis, x_lo, x_hi):
        add(
            layer=LayerKind.TICK_LABEL,
            importance=LAYER_IMPORTANCE[LayerKind.TICK_LABEL],
            axis="x",
            tick_value=tv,
            text=format_tick(tv, spec.x_axis.kind, x_span),
            text_anchor="middle",
        )
    if spec.x_axis.title:
        add(
            layer=LayerKind.AXIS_TITLE,
            importance=LAYER_IMPORTANCE[LayerKind.AXIS_TITLE],
            axis="x",
            text=spec.x_axis.title,
            text_anchor="middle",
        )

    # Y axis: line, ticks, tick labels, title, plus horizontal gridlines.
    add(layer=LayerKind.AXIS_LINE, importance=LAYER_IMPORTANCE[LayerKind.AXIS_LINE], axis="y")
    y_span = y_hi - y_lo
    for tv in _tick_values(spec.y_axis, y_lo, y_hi):
        add(layer=LayerKind.TICK_MARK, importance=LAYER_IMPORTANCE[LayerKind.TICK_MARK], axis="y", tick_value=tv)
    for tv in _tick_values(spec.y_axis, y_lo, y_hi):
        add(
            layer=LayerKind.TICK_LABEL,
            importance=LAYER_IMPORTANCE[LayerKind.TICK_LABEL],
            axis="y",
            tick_value=tv,
            text=format_tick(tv, spec.y_axis.kind, y_span),
            text_anchor="end",
        )
    if spec.y_axis.title:
        add(
            layer=LayerKind.AXIS_TITLE,
            importance=LAYER_IMPORTANCE[LayerKind.AXIS_TITLE],
            axis="y",
            text=spec.y_axis.title,
            text_anchor="start",
        )
    for tv in _tick_values(spec.y_axis, y_lo, y_hi):
        if tv == y_lo:
            continue  # a gridline on the axis baseline is invisible clutter
        add(layer=LayerKind.GRIDLINE, importance=LAYER_IMPORTANCE[LayerKind.GRIDLINE], axis="y", tick_value=tv)

    return elements
