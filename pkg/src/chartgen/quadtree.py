"""Quadtree over axis-aligned rectangles for broad-phase overlap queries."""

from __future__ import annotations

from chartgen.model import BoundingBox


class _Node:
    __slots__ = ("bounds", "depth", "items", "children")

    def __init__(self, bounds: BoundingBox, depth: int):
        self.bounds = bounds
        self.depth = depth
        self.items: list[tuple[int, BoundingBox]] = []
        self.children: list["_Node"] | None = None


def _touches(a: BoundingBox, b: BoundingBox) -> bool:
    # Closed-interval test: items sitting exactly on a split line stay
    # retrievable from both sides.
    return (
        a.x <= b.right
        and b.x <= a.right
        and a.y <= b.bottom
        and b.y <= a.bottom
    )


class Quadtree:
    """Stores (id, bbox) pairs; a spanning item is kept in every child it touches.

    A node subdivides only once it holds more than ``capacity`` items and its
    depth is below ``max_depth``, so degenerate inputs cannot recurse forever.
    """

    def __init__(self, bounds: BoundingBox, capacity: int = 8, max_depth: int = 8):
        if capacity < 1 or max_depth < 1:
            raise ValueError("capacity and max_depth must be >= 1")
        self.capacity = capacity
        self.max_depth = max_depth
        self._root = _Node(bounds, 0)
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def insert(self, item_id: int, bbox: BoundingBox) -> None:
        self._insert(self._root, item_id, bbox)
        self._size += 1

    def _insert(self, node: _Node, item_id: int, bbox: BoundingBox) -> None:
        if node.children is not None:
            for child in node.children:
                if _touches(child.bounds, bbox):
                    self._insert(child, item_id, bbox)
            return
        node.items.append((item_id, bbox))
        if len(node.items) > self.capacity and node.depth < self.max_depth:
            self._subdivide(node)

    def _subdivide(self, node: _Node) -> None:
        b = node.bounds
        hw, hh = b.width / 2.0, b.height / 2.0
        node.children = [
            _Node(BoundingBox(b.x, b.y, hw, hh), node.depth + 1),
            _Node(BoundingBox(b.x + hw, b.y, hw, hh), node.depth + 1),
            _Node(BoundingBox(b.x, b.y + hh, hw, hh), node.depth + 1),
            _Node(BoundingBox(b.x + hw, b.y + hh, hw, hh), node.depth + 1),
        ]
        items, node.items = node.items, []
        for item_id, bbox in items:
            for child in node.children:
                if _touches(child.bounds, bbox):
                    self._insert(child, item_id, bbox)

    def query(self, region: BoundingBox) -> list[int]:
        """Ids of all stored items whose bbox touches the region (deduplicated)."""
        seen: set[int] = set()
        stack = [self._root]
        while stack:
            node = stack.pop()
            if not _touches(node.bounds, region):
                continue
            if node.children is not None:
                stack.extend(node.children)
            else:
                for item_id, bbox in node.items:
                    if item_id not in seen and _touches(bbox, region):
                        seen.add(item_id)
        return sorted(seen)


def build_quadtree(
    rects: list[tuple[int, BoundingBox]],
    bounds: BoundingBox | None = None,
    capacity: int = 8,
    max_depth: int = 8,
) -> Quadtree:
    """Build a tree whose root covers ``bounds`` expanded to hold every rect."""
    if bounds is None:
        bounds = BoundingBox(0.0, 0.0, 1.0, 1.0)
    x0, y0 = bounds.x, bounds.y
    x1, y1 = bounds.right, bounds.bottom
    for _, r in rects:
        x0, y0 = min(x0, r.x), min(y0, r.y)
        x1, y1 = max(x1, r.right), max(y1, r.bottom)
    tree = Quadtree(BoundingBox(x0, y0, x1 - x0, y1 - y0), capacity, max_depth)
    for item_id, r in rects:
        tree.insert(item_id, r)
    return tree
