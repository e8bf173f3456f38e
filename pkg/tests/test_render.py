import xml.etree.ElementTree as ET

import pytest

from chartgen.layout import BASELINE_RATIO, DEFAULT_TEXT_MODEL
from chartgen.model import LayerKind
from chartgen.pipeline import GeneralizedChart, generalize
from chartgen.metrics import ConstraintReport
from chartgen.svg import render
from tests.conftest import DEVICE_SIZES, PHONE, WATCH


def empty_chart(target=(200.0, 100.0)):
    report = ConstraintReport((), (), ())
    return GeneralizedChart(elements=(), target=target, log=(), report=report, elapsed_ms=0.0)


def test_empty_chart_renders_bare_root():
    svg = render(empty_chart())
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert len(list(root)) == 0
    assert root.get("viewBox") == "0 0 200.00 100.00"


def test_render_is_byte_deterministic(fixture_spec, config):
    chart = generalize(fixture_spec, PHONE, config)
    assert render(chart) == render(chart)
    again = generalize(fixture_spec, PHONE, config)
    assert render(chart) == render(again)


def test_watch_svg_structure(fixture_spec, config):
    chart = generalize(fixture_spec, WATCH, config)
    root = ET.fromstring(render(chart))
    tags = [child.tag.split("}")[-1] for child in root]
    assert tags.count("path") == 1
    assert tags.count("line") == 1  # the reference line
    assert tags.count("text") == 2
    assert tags.count("circle") == 0


def test_hidden_elements_omitted(fixture_spec, config):
    chart = generalize(fixture_spec, WATCH, config)
    hidden = [e for e in chart.elements if not e.visible]
    assert hidden
    svg = render(chart)
    visible = [e for e in chart.elements if e.visible]
    root = ET.fromstring(svg)
    assert len(list(root)) == len(visible)


def test_z_order_line_above_gridlines(fixture_spec, config):
    chart = generalize(fixture_spec, (2000.0, 1400.0), config)
    svg = render(chart)
    gridline_pos = svg.find("#dddddd")
    path_pos = svg.find("<path")
    text_pos = svg.rfind("<text")
    assert -1 < gridline_pos < path_pos < text_pos


def test_text_escaped():
    doc = {
        "series": [{"name": "a", "points": [{"x": 0, "y": 1}, {"x": 1, "y": 2}]}],
        "annotations": [{"x": 0.5, "y": 1.5, "text": "a <b> & 'c'"}],
        "originalSize": {"width": 500, "height": 400},
    }
    from chartgen.model import parse_chart_spec

    chart = generalize(parse_chart_spec(doc), (500.0, 400.0))
    svg = render(chart)
    assert "a &lt;b&gt; &amp; 'c'" in svg
    ET.fromstring(svg)  # still parses


def recompute_bbox(node, text_model=DEFAULT_TEXT_MODEL):
    """Invert the emitted geometry back to a bbox, per element kind."""
    tag = node.tag.split("}")[-1]
    if tag == "circle":
        cx, cy, r = (float(node.get(k)) for k in ("cx", "cy", "r"))
        return (cx - r, cy - r, 2 * r, 2 * r)
    if tag == "text":
        font = float(node.get("font-size"))
        text = node.text or ""
        w, h = text_model.measure(text, font)
        x, y = float(node.get("x")), float(node.get("y"))
        anchor = node.get("text-anchor")
        left = {"start": x, "middle": x - w / 2.0, "end": x - w}[anchor]
        top = y - BASELINE_RATIO * h
        return (left, top, w, h)
    return None


def test_round_trip_geometry_within_precision(fixture_spec, config):
    for target in DEVICE_SIZES:
        chart = generalize(fixture_spec, target, config)
        root = ET.fromstring(render(chart))
        drawn = [n for n in root if n.tag.split("}")[-1] in ("circle", "text")]
        visible = [
            e
            for e in sorted(chart.elements, key=lambda e: e.id)
            if e.visible and (e.layer is LayerKind.DATA_POINT or e.text is not None)
        ]
        assert len(drawn) == len(visible)
        by_key = {}
        for e in visible:
            key = (round(e.bbox.center[0], 1), round(e.bbox.center[1], 1), e.text)
            by_key[key] = e
        for node in drawn:
            got = recompute_bbox(node)
            assert got is not None
            # match against the element with the same text and nearby center
            # Positions round-trip within the 0.01 px serialization precision;
            # text extents additionally inherit the font-size rounding,
            # amplified by the glyph advance per character.
            text = node.text if node.tag.split("}")[-1] == "text" else None
            dim_tol = 0.011 + 0.6 * 0.005 * len(text or "")
            matches = [
                e
                for e in visible
                if (e.text or None) == text
                and abs(e.bbox.x - got[0]) <= 0.011 + 0.3 * 0.005 * len(text or "")
                and abs(e.bbox.y - got[1]) <= 0.011
                and abs(e.bbox.width - got[2]) <= dim_tol
                and abs(e.bbox.height - got[3]) <= dim_tol
            ]
            assert matches, f"no element matches recomputed bbox {got} for {node.tag}"


def test_corpus_svgs_parse_strictly(config):
    from chartgen.pipeline import size_sweep
    from tests.corpus import corpus_specs

    for spec in corpus_specs()[:5]:
        for item in size_sweep(spec, [PHONE, WATCH], config):
            ET.fromstring(render(item.chart))
