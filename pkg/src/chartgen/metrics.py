"""Spatial clutter metrics: density grid, distances, collision area, area ratio.

Three guidelines drive the operator loop — no region may be congested, no
legibility-critical elements may overlap, and every element must stay large
enough to read — and :func:`evaluate_constraints` reports violations of each.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from chartgen.config import EngineConfig
from chartgen.layout import GLYPH_ADVANCE_RATIO, LINE_HEIGHT_RATIO
from chartgen.model import BoundingBox, Element, LayerKind
from chartgen.quadtree import Quadtree, build_quadtree

# Layers whose legibility the conflict guideline protects. A pair is checked
# when one side is in this set and the other is in the set or is a data point;
# line-line and line-gridline overlap is not a conflict.
CONFLICT_LAYERS = frozenset({LayerKind.POINT_LABEL, LayerKind.ANNOTATION, LayerKind.TICK_LABEL})
CONFLICT_PARTNER_LAYERS = CONFLICT_LAYERS | {LayerKind.DATA_POINT}

TEXT_LAYERS = frozenset(
    {
        LayerKind.POINT_LABEL,
        LayerKind.ANNOTATION,
        LayerKind.TICK_LABEL,
        LayerKind.AXIS_TITLE,
        LayerKind.CHART_TITLE,
    }
)


@dataclass(frozen=True)
class DensityGrid:
    """Uniform n x m grid of element counts per cell pixel area.

    ``counts[i, j]`` is the number of visible elements whose bbox intersects
    cell (i, j) with positive area (column i, row j, origin top-left); an
    element spanning k cells contributes to all k.
    """

    dims: tuple[int, int]
    cell_size: tuple[float, float]
    counts: np.ndarray
    density: np.ndarray

    @property
    def max_density(self) -> float:
        return float(self.density.max())

    @property
    def mean_density(self) -> float:
        return float(self.density.mean())

    def cell_index(self, px: float, py: float) -> tuple[int, int]:
        n, m = self.dims
        cw, ch = self.cell_size
        i = min(n - 1, max(0, int(px // cw)))
        j = min(m - 1, max(0, int(py // ch)))
        return (i, j)


def grid_dims(target: tuple[float, float], cell_size_px: float) -> tuple[int, int]:
    # floor keeps cells at least cell_size_px wide, so a density threshold of
    # k/cell_size^2 means "more than k elements per cell" rather than flipping
    # on sub-32px rounding.
    n = max(3, math.floor(target[0] / cell_size_px))
    m = max(3, math.floor(target[1] / cell_size_px))
    return (n, m)


def cell_cover(
    bbox: BoundingBox,
    target: tuple[float, float],
    dims: tuple[int, int],
) -> tuple[int, int, int, int]:
    """Inclusive cell index range (i0, i1, j0, j1) the bbox contributes to.

    Zero-area boxes and boxes entirely off-canvas collapse to the single cell
    containing their (clamped) center, so every element lands somewhere.
    """
    n, m = dims
    cw, ch = target[0] / n, target[1] / m
    # Effective extents: a width too small to move the right edge is zero for
    # every overlap computation, so treat it as zero here too.
    if bbox.right > bbox.x and bbox.bottom > bbox.y:
        i0 = max(0, int(math.floor(bbox.x / cw)))
        i1 = min(n - 1, int(math.ceil(bbox.right / cw)) - 1)
        j0 = max(0, int(math.floor(bbox.y / ch)))
        j1 = min(m - 1, int(math.ceil(bbox.bottom / ch)) - 1)
        if i0 <= i1 and j0 <= j1:
            return (i0, i1, j0, j1)
    cx, cy = bbox.center
    i = min(n - 1, max(0, int(cx // cw)))
    j = min(m - 1, max(0, int(cy // ch)))
    return (i, i, j, j)


def cell_cover_arrays(
    bx: np.ndarray,
    by: np.ndarray,
    bw: np.ndarray,
    bh: np.ndarray,
    target: tuple[float, float],
    dims: tuple[int, int],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized :func:`cell_cover` over parallel bbox component arrays."""
    n, m = dims
    cw, ch = target[0] / n, target[1] / m
    ci = np.clip(((bx + bw / 2.0) // cw).astype(np.int64), 0, n - 1)
    cj = np.clip(((by + bh / 2.0) // ch).astype(np.int64), 0, m - 1)
    i0 = np.maximum(0, np.floor(bx / cw).astype(np.int64))
    i1 = np.minimum(n - 1, np.ceil((bx + bw) / cw).astype(np.int64) - 1)
    j0 = np.maximum(0, np.floor(by / ch).astype(np.int64))
    j1 = np.minimum(m - 1, np.ceil((by + bh) / ch).astype(np.int64) - 1)
    degenerate = (bx + bw <= bx) | (by + bh <= by) | (i0 > i1) | (j0 > j1)
    i0 = np.where(degenerate, ci, i0)
    i1 = np.where(degenerate, ci, i1)
    j0 = np.where(degenerate, cj, j0)
    j1 = np.where(degenerate, cj, j1)
    return i0, i1, j0, j1


def build_density_grid(
    elements: list[Element],
    target: tuple[float, float],
    dims: tuple[int, int],
) -> DensityGrid:
    n, m = dims
    if n < 1 or m < 1 or target[0] <= 0 or target[1] <= 0:
        raise ValueError("grid dims and target must be positive")
    cw, ch = target[0] / n, target[1] / m
    counts = np.zeros((n, m), dtype=np.int64)
    visible = [e for e in elements if e.visible and e.bbox is not None]
    if visible:
        i0, i1, j0, j1 = cell_cover_arrays(
            np.array([e.bbox.x for e in visible]),
            np.array([e.bbox.y for e in visible]),
            np.array([e.bbox.width for e in visible]),
            np.array([e.bbox.height for e in visible]),
            target,
            dims,
        )
        for k in range(len(visible)):
            counts[i0[k] : i1[k] + 1, j0[k] : j1[k] + 1] += 1
    density = counts.astype(np.float64) / (cw * ch)
    return DensityGrid(dims=dims, cell_size=(cw, ch), counts=counts, density=density)


class Quadrant(enum.Enum):
    """Diagonal move directions; step is in cell units (col, row)."""

    NW = (-1, -1)
    NE = (1, -1)
    SW = (-1, 1)
    SE = (1, 1)

    @property
    def step(self) -> tuple[int, int]:
        return self.value


@dataclass(frozen=True)
class QuadrantSums:
    nw: float
    ne: float
    sw: float
    se: float

    def value_of(self, q: Quadrant) -> float:
        return {Quadrant.NW: self.nw, Quadrant.NE: self.ne, Quadrant.SW: self.sw, Quadrant.SE: self.se}[q]


def _block_sum(
    density: np.ndarray,
    i_range: tuple[int, int],
    j_range: tuple[int, int],
    penalty: float,
) -> float:
    n, m = density.shape
    total = 0.0
    for i in range(i_range[0], i_range[1] + 1):
        for j in range(j_range[0], j_range[1] + 1):
            if 0 <= i < n and 0 <= j < m:
                total += float(density[i, j])
            else:
                total += penalty
    return total


def quadrant_sums(
    grid: DensityGrid,
    anchor_cell: tuple[int, int],
    boundary_penalty: float | None = None,
) -> QuadrantSums:
    """Density sums over the four 3x3 blocks diagonally adjacent to a cell.

    Cells falling outside the grid contribute ``boundary_penalty`` (default:
    the grid's maximum cell density) instead of 0, so moves toward the canvas
    edge are never artificially cheap.
    """
    i, j = anchor_cell
    penalty = grid.max_density if boundary_penalty is None else boundary_penalty
    d = grid.density
    return QuadrantSums(
        nw=_block_sum(d, (i - 3, i - 1), (j - 3, j - 1), penalty),
        ne=_block_sum(d, (i + 1, i + 3), (j - 3, j - 1), penalty),
        sw=_block_sum(d, (i - 3, i - 1), (j + 1, j + 3), penalty),
        se=_block_sum(d, (i + 1, i + 3), (j + 1, j + 3), penalty),
    )


def min_density_quadrant(sums: QuadrantSums) -> Quadrant:
    """Direction of the smallest sum; ties resolve NW, NE, SW, SE (first wins)."""
    best = Quadrant.NW
    best_value = sums.nw
    for q in (Quadrant.NE, Quadrant.SW, Quadrant.SE):
        value = sums.value_of(q)
        if value < best_value:
            best, best_value = q, value
    return best


def layer_distances(
    elements: list[Element], layer: LayerKind
) -> list[tuple[tuple[int, int], float]]:
    """Euclidean center distances for every unordered pair within one layer."""
    members = [e for e in elements if e.visible and e.layer is layer and e.bbox is not None]
    out: list[tuple[tuple[int, int], float]] = []
    for a_idx in range(len(members)):
        ax, ay = members[a_idx].bbox.center
        for b_idx in range(a_idx + 1, len(members)):
            bx, by = members[b_idx].bbox.center
            out.append(
                ((members[a_idx].id, members[b_idx].id), math.hypot(bx - ax, by - ay))
            )
    return out


def positive_overlap_pairs(
    boxes_x: np.ndarray, boxes_y: np.ndarray, boxes_w: np.ndarray, boxes_h: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All index pairs (a, b) with a < b and positive bbox overlap, plus areas.

    Plane sweep over x-sorted boxes: each box only checks the contiguous run
    of later boxes whose left edge lies before its right edge, so cost tracks
    the number of x-overlapping pairs instead of n^2.
    """
    n = len(boxes_x)
    empty = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), np.empty(0))
    if n < 2:
        return empty
    x1 = boxes_x + boxes_w
    y1 = boxes_y + boxes_h
    order = np.argsort(boxes_x, kind="stable")
    sx0, sx1 = boxes_x[order], x1[order]
    sy0, sy1 = boxes_y[order], y1[order]
    a_parts: list[np.ndarray] = []
    b_parts: list[np.ndarray] = []
    area_parts: list[np.ndarray] = []
    his = np.searchsorted(sx0, sx1, side="left")
    for pos in range(n - 1):
        hi = int(his[pos])
        if hi <= pos + 1:
            continue
        win = slice(pos + 1, hi)
        w = np.minimum(sx1[pos], sx1[win]) - np.maximum(sx0[pos], sx0[win])
        h = np.minimum(sy1[pos], sy1[win]) - np.maximum(sy0[pos], sy0[win])
        ok = (w > 0.0) & (h > 0.0)
        if not ok.any():
            continue
        hits = np.nonzero(ok)[0]
        a_parts.append(np.full(len(hits), order[pos], dtype=np.int64))
        b_parts.append(order[pos + 1 + hits])
        area_parts.append((w[hits] * h[hits]))
    if not a_parts:
        return empty
    a = np.concatenate(a_parts)
    b = np.concatenate(b_parts)
    areas = np.concatenate(area_parts)
    swap = a > b
    a2 = np.where(swap, b, a)
    b2 = np.where(swap, a, b)
    return a2, b2, areas


def total_collision_area(
    elements: list[Element],
    capacity: int = 8,
    max_depth: int = 8,
) -> float:
    """Ordered-pair overlap sum: every overlapping pair counts twice, once per
    direction, exactly as the metric is defined. Candidate pairs come from a
    quadtree but the result matches the brute-force double loop bit for bit
    (same terms accumulated in the same id order)."""
    visible = sorted(
        (e for e in elements if e.visible and e.bbox is not None), key=lambda e: e.id
    )
    rects = [(e.id, e.bbox) for e in visible]
    by_id = {e.id: e.bbox for e in visible}
    tree = build_quadtree(rects, capacity=capacity, max_depth=max_depth)
    total = 0.0
    for e in visible:
        for other_id in tree.query(e.bbox):
            if other_id != e.id:
                total += e.bbox.intersection_area(by_id[other_id])
    return total


def area_ratio(element: Element, target: tuple[float, float]) -> float:
    """Fraction of the display the element's bbox covers."""
    if target[0] <= 0 or target[1] <= 0:
        raise ValueError("target area must be > 0")
    if element.bbox is None:
        return 0.0
    return element.bbox.area / (target[0] * target[1])


def min_legible_area_ratio(element: Element, target: tuple[float, float], min_font_px: float) -> float:
    """Area ratio the element would have if its text rendered at the legibility
    floor; text below this ratio cannot be read at the current scale."""
    if element.layer not in TEXT_LAYERS or not element.text:
        return 0.0
    min_area = (
        GLYPH_ADVANCE_RATIO * min_font_px * len(element.text)
    ) * (LINE_HEIGHT_RATIO * min_font_px)
    return min_area / (target[0] * target[1])


@dataclass(frozen=True)
class ConstraintReport:
    """Per-guideline violations; ``satisfied`` iff all three lists are empty."""

    congestion_violations: tuple[tuple[tuple[int, int], float], ...]
    conflict_violations: tuple[tuple[tuple[int, int], float], ...]
    prominence_violations: tuple[tuple[int, float], ...]

    @property
    def satisfied(self) -> bool:
        return not (
            self.congestion_violations or self.conflict_violations or self.prominence_violations
        )

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "congestion": [
                {"cell": list(cell), "density": density}
                for cell, density in self.congestion_violations
            ],
            "conflicts": [
                {"ids": list(pair), "overlapArea": area}
                for pair, area in self.conflict_violations
            ],
            "prominence": [
                {"id": eid, "areaRatio": ratio} for eid, ratio in self.prominence_violations
            ],
        }


def conflict_pair_eligible(a: LayerKind, b: LayerKind) -> bool:
    return (a in CONFLICT_LAYERS and b in CONFLICT_PARTNER_LAYERS) or (
        b in CONFLICT_LAYERS and a in CONFLICT_PARTNER_LAYERS
    )


def find_conflicts(
    elements: list[Element],
    capacity: int = 8,
    max_depth: int = 8,
) -> list[tuple[tuple[int, int], float]]:
    """Positive-area overlaps between conflict-eligible visible elements."""
    pool = {
        e.id: e
        for e in elements
        if e.visible and e.bbox is not None and e.layer in CONFLICT_PARTNER_LAYERS
    }
    if len(pool) > 512:
        return _find_conflicts_dense(pool)
    tree = build_quadtree(
        [(e.id, e.bbox) for e in pool.values()], capacity=capacity, max_depth=max_depth
    )
    out: list[tuple[tuple[int, int], float]] = []
    for eid in sorted(pool):
        e = pool[eid]
        if e.layer not in CONFLICT_LAYERS:
            continue
        for other_id in tree.query(e.bbox):
            if other_id <= eid and pool[other_id].layer in CONFLICT_LAYERS:
                continue  # unordered pair already emitted (or self)
            if other_id == eid:
                continue
            other = pool[other_id]
            if not conflict_pair_eligible(e.layer, other.layer):
                continue
            area = e.bbox.intersection_area(other.bbox)
            if area > 0.0:
                out.append(((min(eid, other_id), max(eid, other_id)), area))
    return sorted(set(out))


def _find_conflicts_dense(pool: dict[int, Element]) -> list[tuple[tuple[int, int], float]]:
    """Sweep variant of find_conflicts for large element sets; same results."""
    ids = sorted(pool)
    members = [pool[i] for i in ids]
    a_idx, b_idx, areas = positive_overlap_pairs(
        np.array([e.bbox.x for e in members]),
        np.array([e.bbox.y for e in members]),
        np.array([e.bbox.width for e in members]),
        np.array([e.bbox.height for e in members]),
    )
    is_source = np.array([e.layer in CONFLICT_LAYERS for e in members])
    keep = is_source[a_idx] | is_source[b_idx]
    return sorted(
        ((ids[a], ids[b]), float(area))
        for a, b, area in zip(a_idx[keep].tolist(), b_idx[keep].tolist(), areas[keep].tolist())
    )


def evaluate_constraints(
    elements: list[Element],
    grid: DensityGrid,
    target: tuple[float, float],
    config: EngineConfig,
) -> ConstraintReport:
    """Evaluate the three clutter guidelines against the current element set."""
    congestion: list[tuple[tuple[int, int], float]] = []
    over = np.argwhere(grid.density > config.density_threshold)
    for i, j in over.tolist():
        congestion.append(((int(i), int(j)), float(grid.density[i, j])))
    congestion.sort()

    conflicts = find_conflicts(
        elements, capacity=config.quadtree_capacity, max_depth=config.quadtree_max_depth
    )

    prominence: list[tuple[int, float]] = []
    for e in sorted(
        (e for e in elements if e.visible and e.bbox is not None), key=lambda e: e.id
    ):
        floor = min_legible_area_ratio(e, target, config.min_font_px)
        if floor > 0.0:
            ratio = area_ratio(e, target)
            if ratio < floor:
                prominence.append((e.id, ratio))

    return ConstraintReport(
        congestion_violations=tuple(congestion),
        conflict_violations=tuple(conflicts),
        prominence_violations=tuple(prominence),
    )
