"""Generalization operators: jittering, elimination, tick merging, transitions.

Jittering and elimination share an incremental working state (numpy-backed
overlap matrix + density counts) so the removal loop stays near O(n^2) for the
whole chart instead of per iteration. All operators are pure from the
caller's point of view: they take an element list and return a new one plus
audit-log entries.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from chartgen.config import EliminationWeights, EngineConfig
from chartgen.layout import DEFAULT_TEXT_MODEL, TextMetrics, base_font_px, label_gap
from chartgen.metrics import (
    CONFLICT_LAYERS,
    CONFLICT_PARTNER_LAYERS,
    DensityGrid,
    QuadrantSums,
    build_density_grid,
    cell_cover_arrays,
    grid_dims,
    min_density_quadrant,
    min_legible_area_ratio,
    positive_overlap_pairs,
)
from chartgen.model import (
    BoundingBox,
    Element,
    FeaturePointKind,
    LayerKind,
    Series,
    format_value,
)
from chartgen.simplify import feature_preserving_epsilon, simplify_indices

# Layers the elimination loop may hide. The data line is exempt outright; a
# reference line is itself the surrogate for removed furniture.
ELIMINABLE_LAYERS = frozenset(LayerKind) - {LayerKind.DATA_LINE, LayerKind.REFERENCE_LINE}

# Kinds whose point labels stay protected while any intermediate or local
# extremum label is still visible.
PROTECTED_KINDS = frozenset(
    {
        FeaturePointKind.FIRST,
        FeaturePointKind.LAST,
        FeaturePointKind.GLOBAL_MAX,
        FeaturePointKind.GLOBAL_MIN,
    }
)
TIER_ONE_KINDS = frozenset(
    {FeaturePointKind.INTERMEDIATE, FeaturePointKind.LOCAL_MAX, FeaturePointKind.LOCAL_MIN}
)

MOVABLE_LAYERS = frozenset({LayerKind.POINT_LABEL, LayerKind.ANNOTATION})

SPARKLINE_HIDDEN_LAYERS = frozenset(
    {
        LayerKind.AXIS_LINE,
        LayerKind.TICK_MARK,
        LayerKind.TICK_LABEL,
        LayerKind.GRIDLINE,
        LayerKind.AXIS_TITLE,
        LayerKind.DATA_POINT,
    }
)
AXIS_HIDDEN_LAYERS = SPARKLINE_HIDDEN_LAYERS - {LayerKind.DATA_POINT}


@dataclass(frozen=True)
class OperatorLogEntry:
    """One pipeline mutation: which operator, which elements, what it changed."""

    op: str
    element_ids: tuple[int, ...]
    params: dict[str, Any]
    collision_before: float
    collision_after: float
    congested_before: int
    congested_after: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "op": self.op,
            "elementIds": list(self.element_ids),
            "params": self.params,
            "collisionBefore": self.collision_before,
            "collisionAfter": self.collision_after,
            "congestedBefore": self.congested_before,
            "congestedAfter": self.congested_after,
        }


def elimination_score(
    importance: float,
    local_density: float,
    overlap: float,
    weights: EliminationWeights,
) -> float:
    """Removal score: (1 - imp) * w_imp + density * w_dens + overlap * w_ov.

    All inputs normalized to [0, 1]; higher score = better removal candidate.
    """
    return (
        (1.0 - importance) * weights.importance
        + local_density * weights.density
        + overlap * weights.overlap
    )


# ---------------------------------------------------------------------------
# Incremental working state shared by jittering and elimination


_LAYER_CODE = {layer: i for i, layer in enumerate(LayerKind)}


class _WorkingState:
    """Mutable bookkeeping over an element list.

    Maintains the full pairwise overlap matrix, per-cell element counts and
    the three constraint-violation sets incrementally, so hiding or nudging
    one element costs O(n) instead of a full re-evaluation.
    """

    def __init__(
        self,
        elements: list[Element],
        target: tuple[float, float],
        config: EngineConfig,
        counts_override: np.ndarray | None = None,
        dims: tuple[int, int] | None = None,
    ):
        self.elements = list(elements)
        self.target = target
        self.config = config
        n = len(elements)
        self.n = n
        self.ids = np.array([e.id for e in elements], dtype=np.int64)

        self.visible = np.array(
            [e.visible and e.bbox is not None for e in elements], dtype=bool
        )
        boxes = [e.bbox if e.bbox is not None else BoundingBox(0, 0, 0, 0) for e in elements]
        self.bx = np.array([b.x for b in boxes])
        self.by = np.array([b.y for b in boxes])
        self.bw = np.array([b.width for b in boxes])
        self.bh = np.array([b.height for b in boxes])
        self.imp = np.array([e.importance for e in elements])
        self.area = self.bw * self.bh
        self.layer = np.array([_LAYER_CODE[e.layer] for e in elements])
        self.flagged = np.array([e.flagged_for_elimination for e in elements], dtype=bool)
        self.moved = np.zeros(n, dtype=bool)

        def layer_mask(layers: frozenset[LayerKind]) -> np.ndarray:
            codes = [_LAYER_CODE[l] for l in layers]
            return np.isin(self.layer, codes)

        self.movable = layer_mask(MOVABLE_LAYERS)
        self.eliminable = layer_mask(ELIMINABLE_LAYERS)
        self.conflict_src = layer_mask(CONFLICT_LAYERS)
        self.conflict_part = layer_mask(CONFLICT_PARTNER_LAYERS)

        protected = np.zeros(n, dtype=bool)
        tier_one = np.zeros(n, dtype=bool)
        for k, e in enumerate(elements):
            if e.layer is LayerKind.AXIS_LINE:
                protected[k] = True
            elif e.layer is LayerKind.POINT_LABEL and e.feature_kind in PROTECTED_KINDS:
                protected[k] = True
            if e.layer is LayerKind.POINT_LABEL and e.feature_kind in TIER_ONE_KINDS:
                tier_one[k] = True
        self.protected = protected
        self.tier_one_labels = tier_one
        self.tier_one_visible = int((tier_one & self.visible).sum())

        # Each point label's own data point (same series, same data anchor).
        point_of: dict[tuple[str | None, tuple[float, float]], int] = {}
        for k, e in enumerate(elements):
            if e.layer is LayerKind.DATA_POINT and e.anchor_data is not None:
                point_of[(e.series_name, e.anchor_data)] = k
        self.own_point = np.full(n, -1, dtype=np.int64)
        for k, e in enumerate(elements):
            if e.layer is LayerKind.POINT_LABEL and e.anchor_data is not None:
                self.own_point[k] = point_of.get((e.series_name, e.anchor_data), -1)

        # Pairwise overlap bookkeeping from a single sweep over visible boxes;
        # individual overlap rows are recomputed on demand (O(n) vectorized).
        self.overlap_sum = np.zeros(n)
        self.eligible_overlap_sum = np.zeros(n)
        self.conflict_count = np.zeros(n, dtype=np.int64)
        vis_idx = np.nonzero(self.visible)[0]
        a_loc, b_loc, areas = positive_overlap_pairs(
            self.bx[vis_idx], self.by[vis_idx], self.bw[vis_idx], self.bh[vis_idx]
        )
        a_idx, b_idx = vis_idx[a_loc], vis_idx[b_loc]
        np.add.at(self.overlap_sum, a_idx, areas)
        np.add.at(self.overlap_sum, b_idx, areas)
        eligible = (self.conflict_src[a_idx] & self.conflict_part[b_idx]) | (
            self.conflict_src[b_idx] & self.conflict_part[a_idx]
        )
        np.add.at(self.conflict_count, a_idx[eligible], 1)
        np.add.at(self.conflict_count, b_idx[eligible], 1)
        np.add.at(self.eligible_overlap_sum, a_idx[eligible], areas[eligible])
        np.add.at(self.eligible_overlap_sum, b_idx[eligible], areas[eligible])
        self.total_conflict_pairs = int(eligible.sum())
        self.collision_running = 2.0 * float(areas.sum())

        # Density grid counts.
        self.dims = dims or grid_dims(target, config.cell_size_px)
        self.cell_w = target[0] / self.dims[0]
        self.cell_h = target[1] / self.dims[1]
        i0, i1, j0, j1 = cell_cover_arrays(self.bx, self.by, self.bw, self.bh, target, self.dims)
        self.cover = np.stack([i0, i1, j0, j1], axis=1)
        self.center_i = np.clip(
            ((self.bx + self.bw / 2.0) // self.cell_w).astype(np.int64), 0, self.dims[0] - 1
        )
        self.center_j = np.clip(
            ((self.by + self.bh / 2.0) // self.cell_h).astype(np.int64), 0, self.dims[1] - 1
        )
        if counts_override is not None:
            self.counts = counts_override.astype(np.int64).copy()
        else:
            self.counts = np.zeros(self.dims, dtype=np.int64)
            for k in range(n):
                if self.visible[k]:
                    a, b, c, d = self.cover[k]
                    self.counts[a : b + 1, c : d + 1] += 1
        self._counts_max = int(self.counts.max())
        self._counts_max_dirty = False
        cell_area = self.cell_w * self.cell_h
        self.congested_grid = (self.counts / cell_area) > config.density_threshold
        self.congested_cells = int(self.congested_grid.sum())

        # Prominence violations never change with position, only visibility.
        self.prominence_violation = np.zeros(n, dtype=bool)
        for k, e in enumerate(elements):
            if not self.visible[k]:
                continue
            floor = min_legible_area_ratio(e, target, config.min_font_px)
            if floor > 0.0 and (self.area[k] / (target[0] * target[1])) < floor:
                self.prominence_violation[k] = True
        self.prominence_count = int(self.prominence_violation.sum())

        # Jitter bookkeeping: once a pass ends with zero accepted moves, the
        # labels it gave up on stay skipped until a new conflict appears.
        self.jitter_given_up: set[int] | None = None

    # -- geometry helpers

    def _cover_of(self, k: int) -> tuple[int, int, int, int]:
        n_cols, n_rows = self.dims
        if self.bx[k] + self.bw[k] > self.bx[k] and self.by[k] + self.bh[k] > self.by[k]:
            i0 = max(0, int(math.floor(self.bx[k] / self.cell_w)))
            i1 = min(n_cols - 1, int(math.ceil((self.bx[k] + self.bw[k]) / self.cell_w)) - 1)
            j0 = max(0, int(math.floor(self.by[k] / self.cell_h)))
            j1 = min(n_rows - 1, int(math.ceil((self.by[k] + self.bh[k]) / self.cell_h)) - 1)
            if i0 <= i1 and j0 <= j1:
                return (i0, i1, j0, j1)
        cx = self.bx[k] + self.bw[k] / 2.0
        cy = self.by[k] + self.bh[k] / 2.0
        i = min(n_cols - 1, max(0, int(cx // self.cell_w)))
        j = min(n_rows - 1, max(0, int(cy // self.cell_h)))
        return (i, i, j, j)

    def _apply_counts(self, cover: np.ndarray | tuple[int, int, int, int], delta: int) -> None:
        i0, i1, j0, j1 = (int(v) for v in cover)
        region = self.counts[i0 : i1 + 1, j0 : j1 + 1]
        region += delta
        cell_area = self.cell_w * self.cell_h
        was = self.congested_grid[i0 : i1 + 1, j0 : j1 + 1]
        now = (region / cell_area) > self.config.density_threshold
        self.congested_cells += int(now.sum()) - int(was.sum())
        self.congested_grid[i0 : i1 + 1, j0 : j1 + 1] = now
        self._counts_max_dirty = True

    def counts_max(self) -> int:
        if self._counts_max_dirty:
            self._counts_max = int(self.counts.max())
            self._counts_max_dirty = False
        return self._counts_max

    def _overlap_vector(self, k: int, x: float, y: float) -> np.ndarray:
        """Overlap areas of element k placed at (x, y) against all visible others."""
        w = np.minimum(self.bx + self.bw, x + self.bw[k]) - np.maximum(self.bx, x)
        h = np.minimum(self.by + self.bh, y + self.bh[k]) - np.maximum(self.by, y)
        vec = np.where((w > 0) & (h > 0) & self.visible, w * h, 0.0)
        vec[k] = 0.0
        return vec

    def _eligible_row(self, k: int) -> np.ndarray:
        """Which elements form conflict-checked pairs with element k."""
        row = np.zeros(self.n, dtype=bool)
        if self.conflict_src[k]:
            row |= self.conflict_part
        if self.conflict_part[k]:
            row |= self.conflict_src
        row[k] = False
        return row

    # -- constraint views

    def satisfied(self) -> bool:
        return (
            self.total_conflict_pairs == 0
            and self.congested_cells == 0
            and self.prominence_count == 0
        )

    def collision_total(self) -> float:
        return self.collision_running

    def conflicted_movables(self) -> list[int]:
        idx = np.nonzero((self.conflict_count > 0) & self.movable & self.visible)[0]
        return idx.tolist()

    def cell_of_center(self, k: int) -> tuple[int, int]:
        cx = self.bx[k] + self.bw[k] / 2.0
        cy = self.by[k] + self.bh[k] / 2.0
        n_cols, n_rows = self.dims
        i = min(n_cols - 1, max(0, int(cx // self.cell_w)))
        j = min(n_rows - 1, max(0, int(cy // self.cell_h)))
        return (i, j)

    def quadrant_sums_at(self, cell: tuple[int, int]) -> QuadrantSums:
        cell_area = self.cell_w * self.cell_h
        penalty = self.counts_max() / cell_area
        i, j = cell
        n_cols, n_rows = self.dims

        def block(i_lo: int, i_hi: int, j_lo: int, j_hi: int) -> float:
            ci0, ci1 = max(i_lo, 0), min(i_hi, n_cols - 1)
            cj0, cj1 = max(j_lo, 0), min(j_hi, n_rows - 1)
            inside = 0
            total = 0.0
            if ci0 <= ci1 and cj0 <= cj1:
                region = self.counts[ci0 : ci1 + 1, cj0 : cj1 + 1]
                total = float(region.sum()) / cell_area
                inside = region.size
            return total + (9 - inside) * penalty

        return QuadrantSums(
            nw=block(i - 3, i - 1, j - 3, j - 1),
            ne=block(i + 1, i + 3, j - 3, j - 1),
            sw=block(i - 3, i - 1, j + 1, j + 3),
            se=block(i + 1, i + 3, j + 1, j + 3),
        )

    # -- mutations

    def hide(self, k: int) -> None:
        row = self._overlap_vector(k, self.bx[k], self.by[k])
        self.collision_running -= 2.0 * float(row.sum())
        self.overlap_sum -= row
        self.overlap_sum[k] = 0.0
        elig = self._eligible_row(k)
        conflict_row = (row > 0.0) & elig
        self.conflict_count -= conflict_row.astype(np.int64)
        self.total_conflict_pairs -= int(conflict_row.sum())
        self.conflict_count[k] = 0
        self.eligible_overlap_sum -= np.where(conflict_row, row, 0.0)
        self.eligible_overlap_sum[k] = 0.0
        self.visible[k] = False
        self._apply_counts(self.cover[k], -1)
        if self.prominence_violation[k]:
            self.prominence_violation[k] = False
            self.prominence_count -= 1
        if self.tier_one_labels[k]:
            self.tier_one_visible -= 1

    def move(self, k: int, dx: float, dy: float) -> None:
        old_row = self._overlap_vector(k, self.bx[k], self.by[k])
        old_cover = tuple(self.cover[k])
        self.bx[k] += dx
        self.by[k] += dy
        new_row = self._overlap_vector(k, self.bx[k], self.by[k])
        self.overlap_sum += new_row - old_row
        self.overlap_sum[k] = float(new_row.sum())
        self.collision_running += 2.0 * (float(new_row.sum()) - float(old_row.sum()))
        elig = self._eligible_row(k)
        old_conf = (old_row > 0.0) & elig
        new_conf = (new_row > 0.0) & elig
        self.conflict_count += new_conf.astype(np.int64) - old_conf.astype(np.int64)
        self.conflict_count[k] = int(new_conf.sum())
        self.total_conflict_pairs += int(new_conf.sum()) - int(old_conf.sum())
        self.eligible_overlap_sum += np.where(new_conf, new_row, 0.0) - np.where(old_conf, old_row, 0.0)
        self.eligible_overlap_sum[k] = float(new_row[new_conf].sum())
        new_cover = self._cover_of(k)
        if new_cover != old_cover:
            self._apply_counts(old_cover, -1)
            self.cover[k] = new_cover
            self._apply_counts(new_cover, +1)
        ci, cj = self.cell_of_center(k)
        self.center_i[k] = ci
        self.center_j[k] = cj
        self.moved[k] = True

    # -- materialization

    def materialize(self) -> list[Element]:
        out: list[Element] = []
        for k, e in enumerate(self.elements):
            changes: dict[str, Any] = {}
            if e.visible and not self.visible[k]:
                changes["visible"] = False
            if self.moved[k]:
                changes["bbox"] = BoundingBox(
                    float(self.bx[k]), float(self.by[k]), float(self.bw[k]), float(self.bh[k])
                )
                if e.anchor_px is not None:
                    center_x = float(self.bx[k] + self.bw[k] / 2.0)
                    if center_x > e.anchor_px[0] + 0.5:
                        changes["text_anchor"] = "start"
                    elif center_x < e.anchor_px[0] - 0.5:
                        changes["text_anchor"] = "end"
            if bool(self.flagged[k]) != e.flagged_for_elimination:
                changes["flagged_for_elimination"] = bool(self.flagged[k])
            out.append(replace(e, **changes) if changes else e)
        return out


# ---------------------------------------------------------------------------
# Jittering


def _jitter_pass(state: _WorkingState, rng: random.Random) -> list[dict[str, Any]]:
    """Simulated-annealing displacement of conflicted labels, one cell-diagonal
    step toward the current minimum-density quadrant per move.

    A label whose candidate move is rejected is set aside until some move
    succeeds (the density field it based its decision on is unchanged until
    then), which keeps repeated passes over stuck layouts cheap.
    """
    config = state.config
    moves: list[dict[str, Any]] = []
    temperature = config.anneal_t0
    width, height = state.target
    conflicted = state.conflicted_movables()
    if state.jitter_given_up is not None and set(conflicted) <= state.jitter_given_up:
        return moves
    pool = list(conflicted)
    for _ in range(config.anneal_iterations):
        if not pool:
            break
        pick = rng.randrange(len(pool))
        k = pool[pick]
        temperature *= config.anneal_decay
        cell = state.cell_of_center(k)
        sums = state.quadrant_sums_at(cell)
        quadrant = min_density_quadrant(sums)
        dx = quadrant.step[0] * state.cell_w
        dy = quadrant.step[1] * state.cell_h
        nx, ny = state.bx[k] + dx, state.by[k] + dy
        rejected = False
        if nx < 0 or ny < 0 or nx + state.bw[k] > width or ny + state.bh[k] > height:
            rejected = True
        if not rejected:
            own = int(state.own_point[k])
            if own >= 0 and state.visible[own]:
                w = min(nx + state.bw[k], state.bx[own] + state.bw[own]) - max(nx, state.bx[own])
                h = min(ny + state.bh[k], state.by[own] + state.bh[own]) - max(ny, state.by[own])
                if w > 0 and h > 0:
                    rejected = True  # a label must not overlap its own data point
        if not rejected:
            energy_before = float(state.eligible_overlap_sum[k])
            candidate = state._overlap_vector(k, nx, ny)
            energy_after = float(candidate[state._eligible_row(k)].sum())
            delta = energy_after - energy_before
            if delta >= 0 and rng.random() >= math.exp(-delta / max(temperature, 1e-9)):
                rejected = True
        if rejected:
            # Stuck until the density field changes: swap-remove from the pool.
            pool[pick] = pool[-1]
            pool.pop()
            continue
        state.move(k, dx, dy)
        moves.append(
            {
                "id": int(state.ids[k]),
                "direction": quadrant.name,
                "dx": dx,
                "dy": dy,
                "quadrantSums": [sums.nw, sums.ne, sums.sw, sums.se],
            }
        )
        conflicted = state.conflicted_movables()
        pool = list(conflicted)  # the density field changed; everyone retries
    # Labels still sitting on their own point could not be placed legally.
    own = state.own_point
    has_own = state.movable & state.visible & (own >= 0)
    if has_own.any():
        k_idx = np.nonzero(has_own)[0]
        o_idx = own[k_idx]
        alive = state.visible[o_idx]
        k_idx, o_idx = k_idx[alive], o_idx[alive]
        w = np.minimum(state.bx[k_idx] + state.bw[k_idx], state.bx[o_idx] + state.bw[o_idx]) - np.maximum(
            state.bx[k_idx], state.bx[o_idx]
        )
        h = np.minimum(state.by[k_idx] + state.bh[k_idx], state.by[o_idx] + state.bh[o_idx]) - np.maximum(
            state.by[k_idx], state.by[o_idx]
        )
        state.flagged[k_idx[(w > 0) & (h > 0)]] = True
    if moves:
        state.jitter_given_up = None
    else:
        state.jitter_given_up = (state.jitter_given_up or set()) | set(conflicted)
    return moves


def jitter_labels(
    elements: list[Element],
    grid: DensityGrid,
    config: EngineConfig,
    seed: int,
) -> tuple[list[Element], OperatorLogEntry]:
    """Displace conflicted labels toward low-density quadrants.

    Deterministic for a fixed seed. Always returns a log entry; the ``moves``
    param is empty when nothing needed displacing.
    """
    state = _WorkingState(
        elements, _grid_target(grid), config, counts_override=grid.counts, dims=grid.dims
    )
    before_collision = state.collision_total()
    before_congested = state.congested_cells
    moves = _jitter_pass(state, random.Random(seed))
    entry = OperatorLogEntry(
        op="jitter",
        element_ids=tuple(dict.fromkeys(m["id"] for m in moves)),
        params={"moves": moves},
        collision_before=before_collision,
        collision_after=state.collision_total(),
        congested_before=before_congested,
        congested_after=state.congested_cells,
    )
    return state.materialize(), entry


def _grid_target(grid: DensityGrid) -> tuple[float, float]:
    return (grid.dims[0] * grid.cell_size[0], grid.dims[1] * grid.cell_size[1])


# ---------------------------------------------------------------------------
# Elimination (jitter + removal loop)


def _pick_victim(state: _WorkingState, candidates: np.ndarray) -> tuple[int, dict[str, Any]]:
    """Highest-score candidate (or lowest, under the fidelity flag), ties broken
    by larger overlap, then lower importance, then smaller element id."""
    config = state.config
    idx = np.nonzero(candidates)[0]
    counts_max = state.counts_max()
    cell_area = state.cell_w * state.cell_h
    ci = state.center_i[idx]
    cj = state.center_j[idx]
    if counts_max > 0:
        density_norm = (state.counts[ci, cj] / cell_area) / (counts_max / cell_area)
    else:
        density_norm = np.zeros(len(idx))
    overlap_norm = np.where(
        state.area[idx] > 0.0,
        np.minimum(1.0, state.overlap_sum[idx] / np.where(state.area[idx] > 0.0, state.area[idx], 1.0)),
        0.0,
    )
    weights = config.weights
    scores = (
        (1.0 - state.imp[idx]) * weights.importance
        + density_norm * weights.density
        + overlap_norm * weights.overlap
    )

    pool = np.ones(len(idx), dtype=bool)
    flagged = state.flagged[idx]
    if flagged.any():
        pool &= flagged
    if config.eliminate_lowest_score_first:
        extreme = scores[pool].min()
    else:
        extreme = scores[pool].max()
    pool &= scores == extreme
    hits = np.nonzero(pool)[0]
    if len(hits) == 1:
        win = int(hits[0])
    else:
        best_overlap = overlap_norm[pool].max()
        pool &= overlap_norm == best_overlap
        least_imp = state.imp[idx][pool].min()
        pool &= state.imp[idx] == least_imp
        ids = state.ids[idx]
        positions = np.nonzero(pool)[0]
        win = int(positions[np.argmin(ids[positions])])
    params = {
        "score": float(scores[win]),
        "importance": float(state.imp[idx][win]),
        "localDensity": float(density_norm[win]),
        "overlap": float(overlap_norm[win]),
    }
    return int(idx[win]), params


def _violation_participants(state: _WorkingState, all_congested: bool = False) -> np.ndarray:
    """Visible elements contributing to at least one current violation.

    Conflict and prominence membership is tracked directly; for congestion,
    elements covering the single worst congested cell are enough for one
    removal round (``all_congested=True`` widens to every congested cell)."""
    mask = (state.conflict_count > 0) | state.prominence_violation
    if state.congested_cells:
        cover = state.cover
        if all_congested:
            cells = [tuple(c) for c in np.argwhere(state.congested_grid).tolist()]
        else:
            masked = np.where(state.congested_grid, state.counts, -1)
            flat = int(np.argmax(masked))  # ties resolve to the smallest (i, j)
            cells = [np.unravel_index(flat, masked.shape)]
        for i, j in cells:
            mask = mask | (
                (cover[:, 0] <= i) & (i <= cover[:, 1]) & (cover[:, 2] <= j) & (j <= cover[:, 3])
            )
    return mask & state.visible


def eliminate(
    elements: list[Element],
    target: tuple[float, float],
    config: EngineConfig,
    seed: int,
) -> tuple[list[Element], list[OperatorLogEntry]]:
    """Jitter, then hide the best removal candidate, until the constraints hold
    or nothing eliminable remains.

    Only elements participating in a violation are candidates, so an
    unconstrained chart passes through untouched. The data line is never
    hidden. Axis lines and first/last/global-extremum labels only become
    candidates once every intermediate and local-extremum label is gone.
    """
    state = _WorkingState(elements, target, config)
    entries: list[OperatorLogEntry] = []
    rng = random.Random(seed)
    for _ in range(state.n + 1):
        if state.satisfied():
            break
        collision_before = state.collision_total()
        congested_before = state.congested_cells
        moves = _jitter_pass(state, rng)
        if moves:
            entries.append(
                OperatorLogEntry(
                    op="jitter",
                    element_ids=tuple(dict.fromkeys(m["id"] for m in moves)),
                    params={"moves": moves},
                    collision_before=collision_before,
                    collision_after=state.collision_total(),
                    congested_before=congested_before,
                    congested_after=state.congested_cells,
                )
            )
        if state.satisfied():
            break
        base = state.eliminable & state.visible
        if state.tier_one_visible > 0:
            base = base & ~state.protected
        candidates = base & _violation_participants(state)
        if not candidates.any():
            candidates = base & _violation_participants(state, all_congested=True)
        if not candidates.any():
            break
        k, params = _pick_victim(state, candidates)
        collision_before = state.collision_total()
        congested_before = state.congested_cells
        state.hide(k)
        entries.append(
            OperatorLogEntry(
                op="eliminate",
                element_ids=(int(state.ids[k]),),
                params=params,
                collision_before=collision_before,
                collision_after=state.collision_total(),
                congested_before=congested_before,
                congested_after=state.congested_cells,
            )
        )
    return state.materialize(), entries


# ---------------------------------------------------------------------------
# Simplification (pipeline wrapper around the Douglas-Peucker core)


def simplify_lines(
    elements: list[Element],
    target: tuple[float, float],
    config: EngineConfig,
) -> tuple[list[Element], list[OperatorLogEntry]]:
    """Reduce each data line to its shape-preserving vertex subset."""
    entries: list[OperatorLogEntry] = []
    out = list(elements)
    snapshot = None  # computed lazily; updated via per-line overlap deltas
    for pos, e in enumerate(out):
        if e.layer is not LayerKind.DATA_LINE or not e.visible or e.vertices_px is None:
            continue
        series = Series(name=e.series_name or "", points=e.vertices_data)
        epsilon = feature_preserving_epsilon(
            series, e.vertices_px, target, retention=config.extrema_retention
        )
        if epsilon <= 0.0:
            continue
        kept = simplify_indices(e.vertices_px, epsilon)
        if len(kept) == len(e.vertices_px):
            continue
        if snapshot is None:
            snapshot = _snapshot(out, target, config)
        before = snapshot
        new_px = tuple(e.vertices_px[i] for i in kept)
        xs = [p[0] for p in new_px]
        ys = [p[1] for p in new_px]
        old_bbox = e.bbox
        new_bbox = BoundingBox(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))
        out[pos] = replace(e, vertices_px=new_px, bbox=new_bbox)
        # Only this line's bbox changed; adjust the collision sum by its own
        # pairwise terms and recount congested cells from a fresh grid.
        others = [o for i, o in enumerate(out) if i != pos and o.visible and o.bbox is not None]
        old_sum = sum(old_bbox.intersection_area(o.bbox) for o in others)
        new_sum = sum(new_bbox.intersection_area(o.bbox) for o in others)
        grid = build_density_grid(
            [o for o in out if o.visible], target, grid_dims(target, config.cell_size_px)
        )
        congested_after = int((grid.density > config.density_threshold).sum())
        snapshot = (before[0] - 2.0 * old_sum + 2.0 * new_sum, congested_after)
        entries.append(
            OperatorLogEntry(
                op="simplify",
                element_ids=(e.id,),
                params={
                    "epsilon": epsilon,
                    "verticesBefore": len(e.vertices_px),
                    "verticesAfter": len(new_px),
                },
                collision_before=before[0],
                collision_after=snapshot[0],
                congested_before=before[1],
                congested_after=congested_after,
            )
        )
    return out, entries


def _snapshot(
    elements: list[Element], target: tuple[float, float], config: EngineConfig
) -> tuple[float, int]:
    visible = [e for e in elements if e.visible and e.bbox is not None]
    grid = build_density_grid(visible, target, grid_dims(target, config.cell_size_px))
    congested = int((grid.density > config.density_threshold).sum())
    _, _, areas = positive_overlap_pairs(
        np.array([e.bbox.x for e in visible]),
        np.array([e.bbox.y for e in visible]),
        np.array([e.bbox.width for e in visible]),
        np.array([e.bbox.height for e in visible]),
    )
    return 2.0 * float(areas.sum()), congested


# ---------------------------------------------------------------------------
# Tick merging


def _adjacent_tick_conflict(
    labels: list[Element], axis: str, gap_min: float
) -> bool:
    for a, b in zip(labels, labels[1:]):
        if a.bbox.intersection_area(b.bbox) > 0.0:
            return True
        gap = (b.bbox.x - a.bbox.right) if axis == "x" else (b.bbox.y - a.bbox.bottom)
        if gap < gap_min:
            return True
    return False


def merge_ticks(
    elements: list[Element],
    target: tuple[float, float],
    config: EngineConfig,
) -> tuple[list[Element], OperatorLogEntry | None]:
    """Double the tick interval (keep every 2nd tick, endpoints always kept)
    until no adjacent tick labels collide or sit closer than the minimum gap."""
    out = list(elements)
    hidden_ids: list[int] = []
    factors: dict[str, int] = {}
    before = None
    for axis in ("x", "y"):
        while True:
            labels = sorted(
                (
                    e
                    for e in out
                    if e.visible and e.layer is LayerKind.TICK_LABEL and e.axis == axis
                ),
                key=(lambda e: e.bbox.x) if axis == "x" else (lambda e: e.bbox.y),
            )
            if len(labels) < 3:
                break
            if not _adjacent_tick_conflict(labels, axis, config.min_tick_gap_px):
                break
            if before is None:
                before = _snapshot(out, target, config)
            keep_positions = set(range(0, len(labels), 2))
            keep_positions.add(len(labels) - 1)
            dropped_values = {
                labels[i].tick_value for i in range(len(labels)) if i not in keep_positions
            }
            factors[axis] = factors.get(axis, 1) * 2
            for pos, e in enumerate(out):
                if (
                    e.visible
                    and e.axis == axis
                    and e.tick_value in dropped_values
                    and e.layer
                    in (LayerKind.TICK_LABEL, LayerKind.TICK_MARK, LayerKind.GRIDLINE)
                ):
                    out[pos] = e.hidden()
                    hidden_ids.append(e.id)
    if not hidden_ids:
        return out, None
    after = _snapshot(out, target, config)
    return out, OperatorLogEntry(
        op="merge_ticks",
        element_ids=tuple(sorted(hidden_ids)),
        params={"intervalFactors": factors},
        collision_before=before[0],
        collision_after=after[0],
        congested_before=before[1],
        congested_after=after[1],
    )


# ---------------------------------------------------------------------------
# Semantic transition (axis furniture -> min/max reference labels)


def semantic_transition(
    elements: list[Element],
    target: tuple[float, float],
    config: EngineConfig,
    text_model: TextMetrics = DEFAULT_TEXT_MODEL,
) -> tuple[list[Element], OperatorLogEntry | None]:
    """Swap axis furniture for a min-reference line plus min/max value labels.

    Fires when the target is sparkline-sized or when the y axis has already
    been eliminated; no-op if a reference line is already present.
    """
    if any(e.layer is LayerKind.REFERENCE_LINE for e in elements):
        return list(elements), None
    sparkline = target[0] * target[1] < config.sparkline_area_px2
    y_axis_gone = any(
        e.layer is LayerKind.AXIS_LINE and e.axis == "y" and not e.visible for e in elements
    )
    if not sparkline and not y_axis_gone:
        return list(elements), None

    before = _snapshot(elements, target, config)
    hidden_layers = SPARKLINE_HIDDEN_LAYERS if sparkline else AXIS_HIDDEN_LAYERS
    out: list[Element] = []
    hidden_ids: list[int] = []
    for e in elements:
        if e.visible and e.layer in hidden_layers:
            out.append(e.hidden())
            hidden_ids.append(e.id)
        else:
            out.append(e)

    lines = [e for e in out if e.layer is LayerKind.DATA_LINE and e.visible]
    data_values = [p[1] for e in lines for p in (e.vertices_data or ())]
    v_min, v_max = min(data_values), max(data_values)
    all_px = [p for e in lines for p in (e.vertices_px or ())]
    span_x0 = min(p[0] for p in all_px)
    span_x1 = max(p[0] for p in all_px)
    y_ref = max(p[1] for p in all_px)  # pixel row of the global minimum
    max_px = min(all_px, key=lambda p: (p[1], p[0]))  # topmost vertex = global max

    font = max(base_font_px(target), config.min_font_px + 1.0)
    gap = label_gap(font)
    next_id = max(e.id for e in out) + 1
    inserted: list[Element] = []

    ref = Element(
        id=next_id,
        layer=LayerKind.REFERENCE_LINE,
        importance=0.85,
        vertices_px=((span_x0, y_ref), (span_x1, y_ref)),
        bbox=BoundingBox(span_x0, y_ref - 0.5, span_x1 - span_x0, 1.0),
    )
    inserted.append(ref)
    next_id += 1

    def clamp(bbox: BoundingBox) -> BoundingBox:
        x = min(max(bbox.x, 0.0), max(0.0, target[0] - bbox.width))
        y = min(max(bbox.y, 0.0), max(0.0, target[1] - bbox.height))
        return BoundingBox(x, y, bbox.width, bbox.height)

    if v_min == v_max:
        text = f"min = max = {format_value(v_min)}"
        w, h = text_model.measure(text, font)
        inserted.append(
            Element(
                id=next_id,
                layer=LayerKind.POINT_LABEL,
                importance=0.85,
                feature_kind=FeaturePointKind.GLOBAL_MIN,
                text=text,
                font_size=font,
                text_anchor="end",
                anchor_px=(span_x1, y_ref),
                bbox=clamp(BoundingBox(span_x1 - w, y_ref + 2.0, w, h)),
            )
        )
    else:
        max_text = format_value(v_max)
        w, h = text_model.measure(max_text, font)
        inserted.append(
            Element(
                id=next_id,
                layer=LayerKind.POINT_LABEL,
                importance=0.85,
                feature_kind=FeaturePointKind.GLOBAL_MAX,
                text=max_text,
                font_size=font,
                text_anchor="middle",
                anchor_px=max_px,
                bbox=clamp(BoundingBox(max_px[0] - w / 2.0, max_px[1] - gap - h, w, h)),
            )
        )
        next_id += 1
        min_text = format_value(v_min)
        w, h = text_model.measure(min_text, font)
        inserted.append(
            Element(
                id=next_id,
                layer=LayerKind.POINT_LABEL,
                importance=0.85,
                feature_kind=FeaturePointKind.GLOBAL_MIN,
                text=min_text,
                font_size=font,
                text_anchor="end",
                anchor_px=(span_x1, y_ref),
                bbox=clamp(BoundingBox(span_x1 - w, y_ref + 2.0, w, h)),
            )
        )

    out.extend(inserted)
    after = _snapshot(out, target, config)
    return out, OperatorLogEntry(
        op="semantic_transition",
        element_ids=tuple(hidden_ids) + tuple(e.id for e in inserted),
        params={
            "trigger": "sparkline" if sparkline else "axis-eliminated",
            "hidden": len(hidden_ids),
            "inserted": [e.id for e in inserted],
            "min": v_min,
            "max": v_max,
        },
        collision_before=before[0],
        collision_after=after[0],
        congested_before=before[1],
        congested_after=after[1],
    )
