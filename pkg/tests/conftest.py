import json

import pytest

from chartgen.config import EngineConfig
from chartgen.layout import layout_elements
from chartgen.model import assign_importance, parse_chart_spec

ORIGINAL = (6307.0, 3220.0)
TABLET = (1536.0, 2048.0)
PHONE = (750.0, 1334.0)
WATCH = (324.0, 394.0)
DEVICE_SIZES = [ORIGINAL, TABLET, PHONE, WATCH]


def fixture_10pt_doc() -> dict:
    """Ten-point chart with two annotations at the original authoring size."""
    ys = [10, 30, 22, 55, 41, 68, 36, 72, 50, 61]
    return {
        "series": [
            {"name": "price", "points": [{"x": 2000 + i, "y": y} for i, y in enumerate(ys)]}
        ],
        "xAxis": {"title": "year", "type": "linear", "tickCount": 5},
        "yAxis": {"title": "price", "tickCount": 5},
        "annotations": [
            {"x": 2003, "y": 55, "text": "spike"},
            {"x": 2007, "y": 72, "text": "peak", "importance": 0.95},
        ],
        "originalSize": {"width": 6307, "height": 3220},
    }


@pytest.fixture
def fixture_doc() -> dict:
    return fixture_10pt_doc()


@pytest.fixture
def fixture_spec():
    return parse_chart_spec(json.dumps(fixture_10pt_doc()))


@pytest.fixture
def config() -> EngineConfig:
    return EngineConfig()


def laid_out(spec, target):
    return layout_elements(assign_importance(spec), target)
