"""Scikit-learn style front door for the generalization pipeline.

``LineChartGeneralizer`` is a stateless transformer over chart documents:
``transform`` maps each input spec (dict, JSON text, or ChartSpec) to a
:class:`~chartgen.pipeline.GeneralizedChart` at the configured target size.
It exists so the engine slots into sklearn-style tooling (``get_params`` /
``set_params``, cloning, pipelines); the functional API in
:func:`chartgen.pipeline.generalize` is equivalent.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin

from chartgen.config import EliminationWeights, EngineConfig
from chartgen.model import ChartSpec, parse_chart_spec
from chartgen.pipeline import GeneralizedChart, generalize


def _coerce_spec(item) -> ChartSpec:
    if isinstance(item, ChartSpec):
        return item
    return parse_chart_spec(item)


class LineChartGeneralizer(BaseEstimator, TransformerMixin):
    """Semantic resizing of line charts as a transformer.

    Parameters mirror :class:`~chartgen.config.EngineConfig`; the elimination
    weights are exposed flat so grid search can vary them independently.

    >>> est = LineChartGeneralizer(target_width=750, target_height=1334)
    >>> charts = est.fit_transform([spec_document])  # doctest: +SKIP
    """

    def __init__(
        self,
        target_width: float = 750.0,
        target_height: float = 1334.0,
        cell_size_px: float = 32.0,
        density_threshold: float = 8.0 / 1024.0,
        min_font_px: float = 7.0,
        min_tick_gap_px: float = 4.0,
        w_importance: float = 0.5,
        w_density: float = 0.3,
        w_overlap: float = 0.2,
        anneal_t0: float = 1.0,
        anneal_decay: float = 0.9,
        anneal_iterations: int = 50,
        extrema_retention: float = 0.6,
        sparkline_area_px2: float = 150_000.0,
        seed: int = 0,
        max_passes: int = 10,
        eliminate_lowest_score_first: bool = False,
    ):
        self.target_width = target_width
        self.target_height = target_height
        self.cell_size_px = cell_size_px
        self.density_threshold = density_threshold
        self.min_font_px = min_font_px
        self.min_tick_gap_px = min_tick_gap_px
        self.w_importance = w_importance
        self.w_density = w_density
        self.w_overlap = w_overlap
        self.anneal_t0 = anneal_t0
        self.anneal_decay = anneal_decay
        self.anneal_iterations = anneal_iterations
        self.extrema_retention = extrema_retention
        self.sparkline_area_px2 = sparkline_area_px2
        self.seed = seed
        self.max_passes = max_passes
        self.eliminate_lowest_score_first = eliminate_lowest_score_first

    def _engine_config(self) -> EngineConfig:
        return EngineConfig(
            cell_size_px=self.cell_size_px,
            density_threshold=self.density_threshold,
            min_font_px=self.min_font_px,
            min_tick_gap_px=self.min_tick_gap_px,
            weights=EliminationWeights(self.w_importance, self.w_density, self.w_overlap),
            anneal_t0=self.anneal_t0,
            anneal_decay=self.anneal_decay,
            anneal_iterations=self.anneal_iterations,
            extrema_retention=self.extrema_retention,
            sparkline_area_px2=self.sparkline_area_px2,
            seed=self.seed,
            max_passes=self.max_passes,
            eliminate_lowest_score_first=self.eliminate_lowest_score_first,
        )

    def fit(self, X, y=None):
        """Validate parameters and every input document; no state is learned."""
        if self.target_width < 2 or self.target_height < 2:
            raise ValueError("target_width and target_height must be >= 2 px")
        self.config_ = self._engine_config()
        for item in X:
            _coerce_spec(item)
        self.n_features_in_ = 0
        return self

    def transform(self, X) -> list[GeneralizedChart]:
        if not hasattr(self, "config_"):
            self.fit(X)
        target = (float(self.target_width), float(self.target_height))
        return [generalize(_coerce_spec(item), target, self.config_) for item in X]
