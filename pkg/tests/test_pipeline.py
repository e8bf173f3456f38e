import json

import pytest

from chartgen.config import EngineConfig, config_from_dict
from chartgen.model import FeaturePointKind, LayerKind, LayoutError
from chartgen.pipeline import generalize, size_sweep
from tests.conftest import DEVICE_SIZES, ORIGINAL, PHONE, TABLET, WATCH, laid_out


def visible(chart):
    return [e for e in chart.elements if e.visible]


def test_original_size_is_fixed_point(fixture_spec, config):
    chart = generalize(fixture_spec, ORIGINAL, config)
    assert chart.log == ()
    assert chart.report.satisfied
    assert tuple(laid_out(fixture_spec, ORIGINAL)) == chart.elements


def test_watch_size_produces_sparkline(fixture_spec, config):
    chart = generalize(fixture_spec, WATCH, config)
    layers = {e.layer for e in visible(chart)}
    assert LayerKind.AXIS_LINE not in layers
    assert LayerKind.TICK_LABEL not in layers
    assert LayerKind.REFERENCE_LINE in layers
    texts = sorted(e.text for e in visible(chart) if e.text)
    assert texts == ["10", "72"]
    ops = {entry.op for entry in chart.log}
    assert "semantic_transition" in ops


def test_visible_count_monotone_over_device_ladder(fixture_spec, config):
    counts = [len(visible(generalize(fixture_spec, t, config))) for t in DEVICE_SIZES]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_data_line_always_visible(fixture_spec, config):
    for target in DEVICE_SIZES:
        chart = generalize(fixture_spec, target, config)
        lines = [e for e in visible(chart) if e.layer is LayerKind.DATA_LINE]
        assert lines


def test_line_endpoints_map_to_first_and_last_points(fixture_spec, config):
    for target in DEVICE_SIZES:
        chart = generalize(fixture_spec, target, config)
        line = next(e for e in visible(chart) if e.layer is LayerKind.DATA_LINE)
        assert line.vertices_data[0] == fixture_spec.series[0].points[0]
        # the rendered polyline endpoints are the first/last data points
        full = laid_out(fixture_spec, target)
        original_px = next(e for e in full if e.layer is LayerKind.DATA_LINE).vertices_px
        assert line.vertices_px[0] == original_px[0]
        assert line.vertices_px[-1] == original_px[-1]


def test_extrema_recoverable_at_every_size(fixture_spec, config):
    y_values = [p[1] for p in fixture_spec.series[0].points]
    lo, hi = min(y_values), max(y_values)
    for target in DEVICE_SIZES:
        chart = generalize(fixture_spec, target, config)
        texts = {e.text for e in visible(chart) if e.text}
        assert str(int(lo)) in texts
        assert str(int(hi)) in texts


def test_serialization_deterministic(fixture_spec, config):
    a = generalize(fixture_spec, PHONE, config).to_json()
    b = generalize(fixture_spec, PHONE, config).to_json()
    assert a == b


def test_timing_excluded_from_canonical_json(fixture_spec, config):
    chart = generalize(fixture_spec, PHONE, config)
    assert "elapsedMs" not in chart.to_dict()
    assert chart.to_dict(include_timing=True)["elapsedMs"] == chart.elapsed_ms
    assert chart.elapsed_ms > 0


def test_seed_changes_are_respected(fixture_spec):
    # different seeds may jitter differently but both must satisfy constraints
    for seed in (0, 7):
        config = config_from_dict({"seed": seed})
        chart = generalize(fixture_spec, WATCH, config)
        assert chart.report.satisfied


def test_too_small_target_raises(fixture_spec, config):
    with pytest.raises(LayoutError):
        generalize(fixture_spec, (1.0, 1.0), config)


def test_report_satisfied_or_log_shows_exhaustion(fixture_spec, config):
    for target in DEVICE_SIZES:
        chart = generalize(fixture_spec, target, config)
        assert chart.report.satisfied or chart.log


def test_sweep_single_target_matches_generalize(fixture_spec, config):
    items = size_sweep(fixture_spec, [PHONE], config)
    assert len(items) == 1
    direct = generalize(fixture_spec, PHONE, config)
    assert items[0].chart.to_json() == direct.to_json()


def test_sweep_three_device_sizes(fixture_spec, config):
    items = size_sweep(fixture_spec, [TABLET, PHONE, WATCH], config)
    assert [i.target for i in items] == [TABLET, PHONE, WATCH]
    assert all(i.chart is not None and i.error is None for i in items)


def test_sweep_duplicates_are_identical(fixture_spec, config):
    items = size_sweep(fixture_spec, [PHONE, PHONE], config)
    assert items[0].chart.to_json() == items[1].chart.to_json()


def test_sweep_reports_bad_target_without_aborting(fixture_spec, config):
    items = size_sweep(fixture_spec, [(1.0, 1.0), PHONE], config)
    assert items[0].chart is None and items[0].error
    assert items[1].chart is not None


def test_sweep_rejects_empty_target_list(fixture_spec, config):
    with pytest.raises(ValueError):
        size_sweep(fixture_spec, [], config)


def test_wire_dict_shape(fixture_spec, config):
    payload = generalize(fixture_spec, WATCH, config).to_dict()
    assert payload["target"] == {"width": 324.0, "height": 394.0}
    assert {"satisfied", "elements", "log", "report"} <= set(payload)
    element = payload["elements"][0]
    assert {"id", "layer", "importance", "visible"} <= set(element)
    assert json.dumps(payload)  # JSON-serializable throughout
