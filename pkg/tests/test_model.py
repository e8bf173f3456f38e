import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chartgen.model import (
    ChartSpecError,
    FeaturePointKind,
    LayerKind,
    Series,
    assign_importance,
    classify_feature_points,
    format_value,
    parse_chart_spec,
)

F = FeaturePointKind


# ---------------------------------------------------------------------------
# Parsing


def test_minimal_document_gets_default_axes():
    spec = parse_chart_spec(
        '{"series": [{"name": "a", "points": [{"x": 0, "y": 1}, {"x": 1, "y": 2}]}],'
        ' "originalSize": {"width": 100, "height": 50}}'
    )
    assert len(spec.series) == 1
    assert spec.x_axis.kind == "linear" and spec.x_axis.title == ""
    assert spec.y_axis.kind == "linear"
    assert spec.annotations == ()


def test_non_increasing_x_rejected():
    doc = {
        "series": [{"name": "a", "points": [{"x": 1, "y": 5}, {"x": 1, "y": 7}]}],
        "originalSize": {"width": 10, "height": 10},
    }
    with pytest.raises(ChartSpecError) as exc:
        parse_chart_spec(doc)
    assert "non-increasing x" in str(exc.value)
    assert "series[0].points[1].x" in exc.value.path


def test_fixture_document_parses(fixture_doc):
    spec = parse_chart_spec(json.dumps(fixture_doc))
    assert len(spec.series[0].points) == 10
    assert len(spec.annotations) == 2
    assert spec.original_size == (6307, 3220)


@pytest.mark.parametrize(
    "mutate, path_fragment",
    [
        (lambda d: d.pop("series"), "series"),
        (lambda d: d.pop("originalSize"), "originalSize"),
        (lambda d: d["series"][0].pop("points"), "series[0].points"),
        (lambda d: d["series"][0]["points"][0].pop("y"), "points[0].y"),
        (lambda d: d.__setitem__("extra", 1), "extra"),
        (lambda d: d["xAxis"].__setitem__("color", "red"), "color"),
        (lambda d: d["xAxis"].__setitem__("type", "log"), "xAxis.type"),
        (lambda d: d["annotations"][0].__setitem__("x", 1900), "annotations[0]"),
        (lambda d: d["annotations"][0].__setitem__("importance", 1.5), "importance"),
        (lambda d: d["originalSize"].__setitem__("width", 0), "originalSize"),
        (lambda d: d["series"][0].__setitem__("points", [{"x": 0, "y": 1}]), "points"),
    ],
)
def test_schema_violations_carry_a_path(fixture_doc, mutate, path_fragment):
    mutate(fixture_doc)
    with pytest.raises(ChartSpecError) as exc:
        parse_chart_spec(fixture_doc)
    assert path_fragment in str(exc.value)


def test_empty_series_list_rejected():
    with pytest.raises(ChartSpecError):
        parse_chart_spec({"series": [], "originalSize": {"width": 10, "height": 10}})


def test_invalid_json_text_rejected():
    with pytest.raises(ChartSpecError):
        parse_chart_spec("{not json")


# ---------------------------------------------------------------------------
# Feature classification


def classify_oracle(ys):
    """Brute-force neighbor-comparison classification, independent of the
    production implementation."""
    n = len(ys)
    kinds = []
    for i in range(n):
        if ys[i] == max(ys) and ys.index(max(ys)) == i:
            kind = F.GLOBAL_MAX
        elif ys[i] == min(ys) and ys.index(min(ys)) == i:
            kind = F.GLOBAL_MIN
        elif 0 < i < n - 1 and ys[i] > ys[i - 1] and ys[i] > ys[i + 1]:
            kind = F.LOCAL_MAX
        elif 0 < i < n - 1 and ys[i] < ys[i - 1] and ys[i] < ys[i + 1]:
            kind = F.LOCAL_MIN
        else:
            kind = F.INTERMEDIATE
        kinds.append(kind)
    kinds[0] = F.FIRST
    kinds[-1] = F.LAST
    return kinds


def series_of(ys):
    return Series(name="s", points=tuple((float(i), float(y)) for i, y in enumerate(ys)))


def test_monotone_series_has_no_interior_extrema():
    assert classify_feature_points(series_of([1, 2, 3])) == [F.FIRST, F.INTERMEDIATE, F.LAST]


def test_mixed_series_matches_oracle():
    got = classify_feature_points(series_of([1, 5, 2, 7, 3]))
    assert got == [F.FIRST, F.LOCAL_MAX, F.LOCAL_MIN, F.GLOBAL_MAX, F.LAST]
    assert got == classify_oracle([1, 5, 2, 7, 3])


def test_plateaus_are_intermediate():
    assert classify_feature_points(series_of([4, 4, 4, 4])) == [
        F.FIRST,
        F.INTERMEDIATE,
        F.INTERMEDIATE,
        F.LAST,
    ]


@given(st.lists(st.integers(min_value=-50, max_value=50), min_size=2, max_size=30))
def test_classification_matches_oracle(ys):
    assert classify_feature_points(series_of(ys)) == classify_oracle(ys)


@given(
    st.lists(st.integers(min_value=-50, max_value=50), min_size=2, max_size=30),
    st.floats(min_value=0.01, max_value=100),
    st.floats(min_value=-1000, max_value=1000),
)
def test_classification_invariant_under_positive_affine_y(ys, scale, shift):
    base = classify_feature_points(series_of(ys))
    mapped = classify_feature_points(series_of([scale * y + shift for y in ys]))
    assert base == mapped


# ---------------------------------------------------------------------------
# Importance assignment


def test_data_line_has_maximum_importance(fixture_spec):
    elements = assign_importance(fixture_spec)
    line = next(e for e in elements if e.layer is LayerKind.DATA_LINE)
    assert line.importance == 1.0
    assert all(e.importance <= line.importance for e in elements)


def test_global_max_label_outranks_intermediate():
    spec = parse_chart_spec(
        {
            "series": [
                {"name": "a", "points": [{"x": i, "y": y} for i, y in enumerate([1, 2, 3, 9, 4])]}
            ],
            "originalSize": {"width": 100, "height": 100},
        }
    )
    elements = assign_importance(spec)
    labels = [e for e in elements if e.layer is LayerKind.POINT_LABEL]
    global_max = next(e for e in labels if e.feature_kind is F.GLOBAL_MAX)
    intermediate = next(e for e in labels if e.feature_kind is F.INTERMEDIATE)
    assert global_max.importance > intermediate.importance


def test_annotation_override_wins(fixture_spec):
    elements = assign_importance(fixture_spec)
    annotations = [e for e in elements if e.layer is LayerKind.ANNOTATION]
    assert annotations[0].importance == 0.7  # layer default
    assert annotations[1].importance == 0.95  # explicit override


def test_ids_unique_and_dense(fixture_spec):
    elements = assign_importance(fixture_spec)
    ids = [e.id for e in elements]
    assert ids == list(range(len(elements)))


def test_every_point_gets_point_and_label(fixture_spec):
    elements = assign_importance(fixture_spec)
    points = [e for e in elements if e.layer is LayerKind.DATA_POINT]
    labels = [e for e in elements if e.layer is LayerKind.POINT_LABEL]
    assert len(points) == len(labels) == 10


# ---------------------------------------------------------------------------
# Value formatting


@pytest.mark.parametrize("value, expected", [(72.0, "72"), (0.5, "0.5"), (-3.25, "-3.25")])
def test_format_value_is_short_and_exact(value, expected):
    assert format_value(value) == expected


@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_format_value_round_trips(value):
    assert float(format_value(value)) == value
