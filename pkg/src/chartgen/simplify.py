"""Polyline simplification (Douglas-Peucker) and shape-preserving tolerance search."""

from __future__ import annotations

import math

import numpy as np

from chartgen.model import FeaturePointKind, Series, classify_feature_points

Point = tuple[float, float]


def _perpendicular_distance(p: Point, a: Point, b: Point) -> float:
    """Distance from p to the infinite line through a and b (to a if a == b)."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    length = math.hypot(dx, dy)
    if length == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    return abs(dx * (a[1] - p[1]) - dy * (a[0] - p[0])) / length


def simplify_indices(points: list[Point] | tuple[Point, ...], epsilon: float) -> list[int]:
    """Indices kept by Douglas-Peucker at tolerance epsilon (ascending).

    Endpoints always survive. Within a span, the first point attaining the
    maximum perpendicular distance to the chord is kept when that distance
    exceeds epsilon. epsilon == 0 keeps everything by definition.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    n = len(points)
    if n < 2:
        raise ValueError("need at least 2 points")
    if epsilon == 0.0 or n == 2:
        return list(range(n))
    px = np.array([p[0] for p in points])
    py = np.array([p[1] for p in points])
    keep = {0, n - 1}
    stack = [(0, n - 1)]
    while stack:
        a, b = stack.pop()
        if b - a < 2:
            continue
        dx = px[b] - px[a]
        dy = py[b] - py[a]
        length = math.hypot(dx, dy)
        inner = slice(a + 1, b)
        if length == 0.0:
            dists = np.hypot(px[inner] - px[a], py[inner] - py[a])
        else:
            dists = np.abs(dx * (py[a] - py[inner]) - dy * (px[a] - px[inner])) / length
        k = int(np.argmax(dists))  # first index attaining the maximum
        if float(dists[k]) > epsilon:
            max_idx = a + 1 + k
            keep.add(max_idx)
            stack.append((a, max_idx))
            stack.append((max_idx, b))
    return sorted(keep)


def simplify_line(
    points: list[Point] | tuple[Point, ...], epsilon: float
) -> list[Point]:
    """Douglas-Peucker simplification; output is a subsequence of the input."""
    return [tuple(points[i]) for i in simplify_indices(points, epsilon)]


def _epsilon_candidates(epsilon_max: float) -> list[float]:
    values: list[float] = []
    e = 0.5
    while e < epsilon_max:
        values.append(e)
        e *= 2.0
    values.append(epsilon_max)
    return values


def feature_preserving_epsilon(
    series: Series,
    points_px: list[Point] | tuple[Point, ...],
    target: tuple[float, float],
    retention: float = 0.6,
) -> float:
    """Largest tolerance that keeps the series' prominent shape.

    Sweeps a geometric ladder of tolerances (capped at 1% of the target
    diagonal) and returns the largest one under which all global extrema and
    both endpoints survive and at least ``ceil(retention * count)`` of the
    local extrema survive. Returns 0.0 when even the smallest rung fails.
    """
    kinds = classify_feature_points(series)
    required = {
        i
        for i, k in enumerate(kinds)
        if k
        in (
            FeaturePointKind.FIRST,
            FeaturePointKind.LAST,
            FeaturePointKind.GLOBAL_MAX,
            FeaturePointKind.GLOBAL_MIN,
        )
    }
    local = {
        i
        for i, k in enumerate(kinds)
        if k in (FeaturePointKind.LOCAL_MAX, FeaturePointKind.LOCAL_MIN)
    }
    needed_locals = math.ceil(retention * len(local))
    epsilon_max = 0.01 * math.hypot(*target)
    for eps in reversed(_epsilon_candidates(epsilon_max)):
        kept = set(simplify_indices(points_px, eps))
        if required <= kept and len(kept & local) >= needed_locals:
            return eps
    return 0.0
