import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chartgen.layout import (
    DEFAULT_TEXT_MODEL,
    TextMetrics,
    base_font_px,
    layout_elements,
    margin_for,
    plot_area_for,
)
from chartgen.model import LayerKind, LayoutError, assign_importance, parse_chart_spec
from tests.conftest import PHONE, laid_out


def test_glyph_model_label_width():
    # "2020" at 10 px: 4 glyphs * 0.6 em advance.
    w, h = DEFAULT_TEXT_MODEL.measure("2020", 10.0)
    assert w == pytest.approx(4 * 0.6 * 10)
    assert h == pytest.approx(12.0)


def test_empty_label_zero_width(fixture_spec):
    assert DEFAULT_TEXT_MODEL.width("", 10.0) == 0.0


@given(
    st.text(max_size=40),
    st.text(max_size=40),
    st.floats(min_value=1, max_value=100),
    st.floats(min_value=1, max_value=100),
)
def test_text_width_monotone_in_length_and_size(a, b, f1, f2):
    model = TextMetrics()
    if len(a) <= len(b):
        assert model.width(a, f1) <= model.width(b, f1)
    lo, hi = sorted([f1, f2])
    assert model.width(a, lo) <= model.width(a, hi)


def test_margins_clamped():
    assert margin_for(10) == 4.0
    assert margin_for(1000) == 60.0
    assert margin_for(500) == pytest.approx(40.0)


def test_point_at_domain_midpoint_maps_to_plot_center():
    spec = parse_chart_spec(
        {
            "series": [
                {
                    "name": "a",
                    "points": [{"x": 0, "y": 0}, {"x": 5, "y": 5}, {"x": 10, "y": 10}],
                }
            ],
            "originalSize": {"width": 100, "height": 100},
        }
    )
    elements = laid_out(spec, (400.0, 300.0))
    mid_point = [e for e in elements if e.layer is LayerKind.DATA_POINT][1]
    plot = plot_area_for(assign_importance(spec), (400.0, 300.0))
    cx, cy = mid_point.bbox.center
    assert cx == pytest.approx(plot.x + plot.width / 2)
    assert cy == pytest.approx(plot.y + plot.height / 2)


def test_layout_is_deterministic(fixture_spec):
    a = laid_out(fixture_spec, PHONE)
    b = laid_out(fixture_spec, PHONE)
    assert a == b


def test_every_element_has_finite_bbox(fixture_spec):
    for e in laid_out(fixture_spec, PHONE):
        assert e.bbox is not None
        for v in (e.bbox.x, e.bbox.y, e.bbox.width, e.bbox.height):
            assert math.isfinite(v)
        assert e.bbox.width >= 0 and e.bbox.height >= 0


def test_polyline_bbox_is_vertex_hull(fixture_spec):
    elements = laid_out(fixture_spec, PHONE)
    line = next(e for e in elements if e.layer is LayerKind.DATA_LINE)
    xs = [p[0] for p in line.vertices_px]
    ys = [p[1] for p in line.vertices_px]
    assert line.bbox.x == min(xs) and line.bbox.right == pytest.approx(max(xs))
    assert line.bbox.y == min(ys) and line.bbox.bottom == pytest.approx(max(ys))


def test_x_order_preserved_across_targets(fixture_spec):
    def point_xs(target):
        return [
            e.bbox.center[0]
            for e in laid_out(fixture_spec, target)
            if e.layer is LayerKind.DATA_POINT
        ]

    for target in [(2000.0, 1000.0), PHONE, (500.0, 600.0)]:
        xs = point_xs(target)
        assert xs == sorted(xs)


def test_tiny_target_rejected(fixture_spec):
    with pytest.raises(LayoutError):
        plot_area_for(assign_importance(fixture_spec), (1.0, 500.0))


def test_margin_overflow_falls_back_to_zero_margins(fixture_spec):
    with pytest.warns(UserWarning, match="cannot host margins"):
        plot = plot_area_for(assign_importance(fixture_spec), (7.0, 7.0))
    assert plot.x == 0.0 and plot.y == 0.0


def test_fonts_scale_with_height():
    assert base_font_px((750.0, 1334.0)) == pytest.approx(0.014 * 1334)
    assert base_font_px((6307.0, 3220.0)) == 40.0  # capped
    assert base_font_px((324.0, 394.0)) < 7.0  # sub-legible at watch scale


def test_labels_stay_inside_canvas(fixture_spec):
    for target in [(6307.0, 3220.0), PHONE, (324.0, 394.0)]:
        for e in laid_out(fixture_spec, target):
            if e.text is not None:
                assert e.bbox.x >= 0 and e.bbox.y >= 0
                assert e.bbox.right <= target[0] + 1e-9
                assert e.bbox.bottom <= target[1] + 1e-9
