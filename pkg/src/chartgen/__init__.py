"""chartgen: semantic resizing of line charts to arbitrary display sizes."""

from chartgen.config import EliminationWeights, EngineConfig, config_from_dict
from chartgen.layout import TextMetrics, layout_elements
from chartgen.metrics import (
    ConstraintReport,
    DensityGrid,
    area_ratio,
    build_density_grid,
    evaluate_constraints,
    layer_distances,
    min_density_quadrant,
    quadrant_sums,
    total_collision_area,
)
from chartgen.model import (
    Annotation,
    AxisSpec,
    BoundingBox,
    ChartSpec,
    ChartSpecError,
    Element,
    FeaturePointKind,
    LayerKind,
    LayoutError,
    Series,
    assign_importance,
    classify_feature_points,
    parse_chart_spec,
)
from chartgen.operators import (
    OperatorLogEntry,
    elimination_score,
    eliminate,
    jitter_labels,
    merge_ticks,
    semantic_transition,
)
from chartgen.pipeline import GeneralizedChart, generalize, size_sweep
from chartgen.quadtree import Quadtree, build_quadtree
from chartgen.simplify import feature_preserving_epsilon, simplify_line
from chartgen.svg import render

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "AxisSpec",
    "BoundingBox",
    "ChartSpec",
    "ChartSpecError",
    "ConstraintReport",
    "DensityGrid",
    "Element",
    "EliminationWeights",
    "EngineConfig",
    "FeaturePointKind",
    "GeneralizedChart",
    "LayerKind",
    "LayoutError",
    "OperatorLogEntry",
    "Quadtree",
    "Series",
    "TextMetrics",
    "area_ratio",
    "assign_importance",
    "build_density_grid",
    "build_quadtree",
    "classify_feature_points",
    "config_from_dict",
    "elimination_score",
    "eliminate",
    "evaluate_constraints",
    "feature_preserving_epsilon",
    "generalize",
    "jitter_labels",
    "layer_distances",
    "layout_elements",
    "merge_ticks",
    "min_density_quadrant",
    "parse_chart_spec",
    "quadrant_sums",
    "render",
    "semantic_transition",
    "simplify_line",
    "size_sweep",
    "total_collision_area",
]
