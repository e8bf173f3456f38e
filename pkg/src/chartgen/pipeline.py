"""Full generalization pipeline: layout, metric evaluation, operator loop.

One pass applies simplification, tick merging, jittering, elimination and the
semantic transition in that order — cheap global reductions first, destructive
selection afterwards, replacement transitions last — and the loop repeats
until the constraint report is clean or nothing changes anymore.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from chartgen.config import EngineConfig
from chartgen.layout import DEFAULT_TEXT_MODEL, TextMetrics, layout_elements
from chartgen.metrics import (
    ConstraintReport,
    build_density_grid,
    evaluate_constraints,
    grid_dims,
)
from chartgen.model import ChartSpec, Element, LayoutError, assign_importance
from chartgen.operators import (
    OperatorLogEntry,
    eliminate,
    jitter_labels,
    merge_ticks,
    semantic_transition,
    simplify_lines,
)


@dataclass(frozen=True)
class GeneralizedChart:
    """Pipeline output: final elements, audit log, and the closing report."""

    elements: tuple[Element, ...]
    target: tuple[float, float]
    log: tuple[OperatorLogEntry, ...]
    report: ConstraintReport
    elapsed_ms: float

    def visible_elements(self) -> list[Element]:
        return [e for e in self.elements if e.visible]

    def to_dict(self, include_timing: bool = False) -> dict:
        """JSON-ready representation.

        Timing is excluded by default so that serialized output is
        byte-identical across runs of the same input.
        """
        out = {
            "target": {"width": self.target[0], "height": self.target[1]},
            "satisfied": self.report.satisfied,
            "elements": [_element_to_dict(e) for e in self.elements],
            "log": [entry.to_dict() for entry in self.log],
            "report": self.report.to_dict(),
        }
        if include_timing:
            out["elapsedMs"] = self.elapsed_ms
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing=include_timing), sort_keys=True)


def _element_to_dict(e: Element) -> dict:
    out: dict = {
        "id": e.id,
        "layer": e.layer.value,
        "importance": e.importance,
        "visible": e.visible,
    }
    if e.bbox is not None:
        out["bbox"] = {
            "x": e.bbox.x,
            "y": e.bbox.y,
            "width": e.bbox.width,
            "height": e.bbox.height,
        }
    if e.text is not None:
        out["text"] = e.text
    if e.font_size is not None:
        out["fontSize"] = e.font_size
    if e.text_anchor is not None:
        out["textAnchor"] = e.text_anchor
    if e.anchor_px is not None:
        out["anchor"] = {"x": e.anchor_px[0], "y": e.anchor_px[1]}
    if e.vertices_px is not None:
        out["points"] = [[p[0], p[1]] for p in e.vertices_px]
    if e.feature_kind is not None:
        out["featureKind"] = e.feature_kind.value
    if e.axis is not None:
        out["axis"] = e.axis
    if e.tick_value is not None:
        out["tickValue"] = e.tick_value
    if e.series_name is not None:
        out["series"] = e.series_name
    return out


def _evaluate(
    elements: list[Element], target: tuple[float, float], config: EngineConfig
) -> ConstraintReport:
    grid = build_density_grid(
        [e for e in elements if e.visible], target, grid_dims(target, config.cell_size_px)
    )
    return evaluate_constraints(elements, grid, target, config)


def generalize(
    spec: ChartSpec,
    target: tuple[float, float],
    config: EngineConfig | None = None,
    text_model: TextMetrics = DEFAULT_TEXT_MODEL,
) -> GeneralizedChart:
    """Generalize a chart to a target display size.

    Deterministic for fixed (spec, target, config); the data line is always
    visible in the result, and the report is satisfied unless the log shows
    the eliminable set was exhausted.
    """
    config = config or EngineConfig()
    if target[0] < 2 or target[1] < 2:
        raise LayoutError(f"target {target[0]:g}x{target[1]:g} is too small to lay out (minimum 2x2)")
    start = time.perf_counter()
    elements = layout_elements(assign_importance(spec), target, text_model)
    log: list[OperatorLogEntry] = []
    report = _evaluate(elements, target, config)
    seed = config.seed
    for pass_index in range(config.max_passes):
        if report.satisfied:
            break
        changed = False

        elements, entries = simplify_lines(elements, target, config)
        if entries:
            log.extend(entries)
            changed = True

        elements, entry = merge_ticks(elements, target, config)
        if entry is not None:
            log.append(entry)
            changed = True

        # Jitter only helps conflicts. Simplify and merge never create new
        # ones, so the pass-start report is a sound emptiness check.
        if report.conflict_violations:
            grid = build_density_grid(
                [e for e in elements if e.visible], target, grid_dims(target, config.cell_size_px)
            )
            elements, entry = jitter_labels(elements, grid, config, seed + pass_index)
            if entry.params["moves"]:
                log.append(entry)
                changed = True

        elements, entries = eliminate(elements, target, config, seed + pass_index)
        if entries:
            log.extend(entries)
            changed = True

        elements, entry = semantic_transition(elements, target, config, text_model)
        if entry is not None:
            log.append(entry)
            changed = True

        report = _evaluate(elements, target, config)
        if not changed:
            break  # nothing left to try; return best effort

    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return GeneralizedChart(
        elements=tuple(elements),
        target=(float(target[0]), float(target[1])),
        log=tuple(log),
        report=report,
        elapsed_ms=elapsed_ms,
    )


@dataclass(frozen=True)
class SweepItem:
    target: tuple[float, float]
    chart: GeneralizedChart | None
    error: str | None


def size_sweep(
    spec: ChartSpec,
    targets: list[tuple[float, float]],
    config: EngineConfig | None = None,
) -> list[SweepItem]:
    """Generalize one chart to several sizes, each computed independently.

    A failing target is reported in its slot without aborting the others.
    """
    if not targets:
        raise ValueError("targets must be non-empty")
    out: list[SweepItem] = []
    for target in targets:
        try:
            out.append(SweepItem(target=target, chart=generalize(spec, target, config), error=None))
        except LayoutError as exc:
            out.append(SweepItem(target=target, chart=None, error=str(exc)))
    return out
