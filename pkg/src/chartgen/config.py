"""Engine configuration: every free threshold of the metrics and operators.

All values are overridable from a JSON config file (and per-request via the
HTTP service); defaults match the shipped behavior described in the README.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any


@dataclass(frozen=True)
class EliminationWeights:
    """Weights of the removal score terms; normalized to sum to 1 at load."""

    importance: float = 0.5
    density: float = 0.3
    overlap: float = 0.2

    def normalized(self) -> "EliminationWeights":
        if min(self.importance, self.density, self.overlap) < 0:
            raise ValueError("elimination weights must be non-negative")
        total = self.importance + self.density + self.overlap
        if total <= 0:
            raise ValueError("elimination weights must not all be zero")
        return EliminationWeights(
            self.importance / total, self.density / total, self.overlap / total
        )


@dataclass(frozen=True)
class EngineConfig:
    cell_size_px: float = 32.0
    # Congestion threshold: elements per px^2 of one cell (8 per 32x32 cell).
    density_threshold: float = 8.0 / (32.0 * 32.0)
    min_font_px: float = 7.0
    min_tick_gap_px: float = 4.0
    weights: EliminationWeights = field(default_factory=EliminationWeights)
    anneal_t0: float = 1.0
    anneal_decay: float = 0.9
    anneal_iterations: int = 50
    extrema_retention: float = 0.6
    sparkline_area_px2: float = 150_000.0
    quadtree_capacity: int = 8
    quadtree_max_depth: int = 8
    seed: int = 0
    max_passes: int = 10
    eliminate_lowest_score_first: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", self.weights.normalized())
        for name in (
            "cell_size_px",
            "density_threshold",
            "min_font_px",
            "min_tick_gap_px",
            "anneal_t0",
            "sparkline_area_px2",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not (0 < self.anneal_decay < 1):
            raise ValueError("anneal_decay must be in (0, 1)")
        if self.anneal_iterations < 0:
            raise ValueError("anneal_iterations must be >= 0")
        if not (0 <= self.extrema_retention <= 1):
            raise ValueError("extrema_retention must be in [0, 1]")
        if self.quadtree_capacity < 1 or self.quadtree_max_depth < 1:
            raise ValueError("quadtree parameters must be >= 1")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")


_WIRE_KEYS = {
    "cellSize": "cell_size_px",
    "densityThreshold": "density_threshold",
    "minFontPx": "min_font_px",
    "minTickGapPx": "min_tick_gap_px",
    "annealT0": "anneal_t0",
    "annealDecay": "anneal_decay",
    "annealIterations": "anneal_iterations",
    "extremaRetention": "extrema_retention",
    "sparklineAreaPx2": "sparkline_area_px2",
    "quadtreeCapacity": "quadtree_capacity",
    "quadtreeMaxDepth": "quadtree_max_depth",
    "seed": "seed",
    "maxPasses": "max_passes",
    "eliminateLowestScoreFirst": "eliminate_lowest_score_first",
}


def config_from_dict(data: dict[str, Any], base: EngineConfig | None = None) -> EngineConfig:
    """Build a config from a (possibly partial) JSON-style dict.

    Unknown keys are rejected so typos in a config file fail loudly.
    """
    base = base or EngineConfig()
    kwargs: dict[str, Any] = {f.name: getattr(base, f.name) for f in fields(EngineConfig)}
    for key, value in data.items():
        if key == "weights":
            if not isinstance(value, dict):
                raise ValueError("weights: expected object")
            extra = set(value) - {"importance", "density", "overlap"}
            if extra:
                raise ValueError(f"weights: unknown key {sorted(extra)[0]!r}")
            current = kwargs["weights"]
            kwargs["weights"] = EliminationWeights(
                float(value.get("importance", current.importance)),
                float(value.get("density", current.density)),
                float(value.get("overlap", current.overlap)),
            )
        elif key in _WIRE_KEYS:
            attr = _WIRE_KEYS[key]
            if attr in ("anneal_iterations", "quadtree_capacity", "quadtree_max_depth", "seed", "max_passes"):
                kwargs[attr] = int(value)
            elif attr == "eliminate_lowest_score_first":
                kwargs[attr] = bool(value)
            else:
                kwargs[attr] = float(value)
        else:
            raise ValueError(f"config: unknown key {key!r}")
    return EngineConfig(**kwargs)


def config_to_dict(config: EngineConfig) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for wire, attr in _WIRE_KEYS.items():
        out[wire] = getattr(config, attr)
    out["weights"] = {
        "importance": config.weights.importance,
        "density": config.weights.density,
        "overlap": config.weights.overlap,
    }
    return out
