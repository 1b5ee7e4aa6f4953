"""Bulk-loaded R-tree over rectangles with Sort-Tile-Recursive packing.

Datasets are static per run, so the tree is built once and queried many
times.  Packing and query results are fully deterministic: entries are
ordered by center coordinates with the insertion index as tie-breaker, and
query results come back sorted by payload id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Hashable

DEFAULT_FANOUT = 16


@dataclass(frozen=True)
class Rect:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.min_x, self.min_y, self.max_x, self.max_y))):
            raise ValueError("rect coordinates must be finite")
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise ValueError(f"rect min exceeds max: {self}")

    @staticmethod
    def point(x: float, y: float) -> "Rect":
        return Rect(x, y, x, y)

    def intersects(self, other: "Rect") -> bool:
        """Closed intersection: touching edges or corners count."""
        return (self.min_x <= other.max_x and other.min_x <= self.max_x
                and self.min_y <= other.max_y and other.min_y <= self.max_y)

    def distance_to_point(self, x: float, y: float) -> float:
        dx = max(self.min_x - x, 0.0, x - self.max_x)
        dy = max(self.min_y - y, 0.0, y - self.max_y)
        return math.hypot(dx, dy)


def _merge(rects: list[Rect]) -> Rect:
    return Rect(min(r.min_x for r in rects), min(r.min_y for r in rects),
                max(r.max_x for r in rects), max(r.max_y for r in rects))


class _Node:
    __slots__ = ("rect", "children", "entries")

    def __init__(self, rect: Rect, children=None, entries=None):
        self.rect = rect
        self.children = children
        self.entries = entries


class RTree:
    """Immutable STR-packed R-tree; build with :func:`bulk_build`."""

    def __init__(self, root: _Node | None, size: int):
        self._root = root
        self._size = size

    def __len__(self) -> int:
        return self._size

    def query_range(self, r: Rect) -> list[Hashable]:
        """Ids of all entries whose rect intersects r (closed), sorted by id."""
        if self._root is None:
            return []
        out: list[Hashable] = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            if not node.rect.intersects(r):
                continue
            if node.entries is not None:
                out.extend(eid for erect, eid in node.entries if erect.intersects(r))
            else:
                stack.extend(node.children)
        out.sort()
        return out

    def within_distance(self, p, d: float) -> list[Hashable]:
        """Ids within Euclidean distance <= d of point p (inclusive), sorted.

        Distance is measured to the entry rect's nearest point, which equals
        the stored point for degenerate rects.
        """
        if d < 0:
            raise ValueError(f"distance must be >= 0: {d}")
        px, py = (p.x, p.y) if hasattr(p, "x") else (p[0], p[1])
        if self._root is None:
            return []
        window = Rect(px - d, py - d, px + d, py + d)
        out: list[Hashable] = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            if not node.rect.intersects(window):
                continue
            if node.entries is not None:
                out.extend(eid for erect, eid in node.entries
                           if erect.intersects(window)
                           and erect.distance_to_point(px, py) <= d)
            else:
                stack.extend(node.children)
        out.sort()
        return out


def bulk_build(items: list[tuple[Rect, Hashable]], fanout: int = DEFAULT_FANOUT) -> RTree:
    """Sort-Tile-Recursive bulk load; empty input yields an empty tree."""
    if fanout < 2:
        raise ValueError(f"fanout must be >= 2: {fanout}")
    if not items:
        return RTree(None, 0)

    def center_key(rect: Rect, idx: int, by_y: bool):
        cx = (rect.min_x + rect.max_x) / 2.0
        cy = (rect.min_y + rect.max_y) / 2.0
        return (cy, cx, idx) if by_y else (cx, cy, idx)

    # Pack entries into leaves, then pack node levels until one root remains.
    def pack(level_rects: list[Rect], payloads: list[Any], make_node) -> list[_Node]:
        n = len(level_rects)
        order = sorted(range(n), key=lambda i: center_key(level_rects[i], i, by_y=False))
        node_count = math.ceil(n / fanout)
        slab_count = math.ceil(math.sqrt(node_count))
        slab_size = math.ceil(n / slab_count)
        nodes = []
        for s in range(0, n, slab_size):
            slab = order[s:s + slab_size]
            slab.sort(key=lambda i: center_key(level_rects[i], i, by_y=True))
            for c in range(0, len(slab), fanout):
                chunk = slab[c:c + fanout]
                nodes.append(make_node([level_rects[i] for i in chunk],
                                       [payloads[i] for i in chunk]))
        return nodes

    rects = [rect for rect, _ in items]
    ids = [eid for _, eid in items]
    level = pack(rects, ids, lambda rs, ps: _Node(_merge(rs), entries=list(zip(rs, ps))))
    while len(level) > 1:
        level = pack([nd.rect for nd in level], level,
                     lambda rs, ps: _Node(_merge(rs), children=ps))
    return RTree(level[0], len(items))
