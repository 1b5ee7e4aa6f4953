"""Independent area estimators for cross-checking the polygon kernel.

Both estimators measure multipolygon area using only ray casting on the raw
vertex arrays; neither touches the boolean-operation engine, so they form a
second computational route for verifying overlay results.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .geometry import MultiPolygon, bounds, contains_many


class MonteCarloEstimate(NamedTuple):
    area: float
    std_error: float

    def within_sigmas(self, value: float, sigmas: float = 3.0, slack: float = 1e-9) -> bool:
        return abs(value - self.area) <= sigmas * self.std_error + slack


def monte_carlo_area(m: MultiPolygon, samples: int = 100_000, seed: int = 0,
                     box: tuple[float, float, float, float] | None = None
                     ) -> MonteCarloEstimate:
    """Uniform-sampling area estimate with its binomial standard error.

    Deterministic for a fixed seed.  The sampling box defaults to the input's
    bounding box; pass a shared box when comparing related geometries.
    """
    if m.is_empty:
        return MonteCarloEstimate(0.0, 0.0)
    x0, y0, x1, y1 = box if box is not None else bounds(m)
    box_area = (x1 - x0) * (y1 - y0)
    if box_area <= 0:
        return MonteCarloEstimate(0.0, 0.0)
    rng = np.random.default_rng(seed)
    pts = np.column_stack([rng.uniform(x0, x1, samples), rng.uniform(y0, y1, samples)])
    inside = contains_many(m, pts, boundary_eps=0.0)
    p = inside.mean()
    std_error = box_area * math.sqrt(max(p * (1.0 - p), 1.0 / samples) / samples)
    return MonteCarloEstimate(float(box_area * p), float(std_error))


class AreaInterval(NamedTuple):
    low: float
    high: float

    def covers(self, value: float, slack: float = 1e-6) -> bool:
        return self.low - slack <= value <= self.high + slack


def quadtree_area(m: MultiPolygon, min_cell_area: float = 0.01) -> AreaInterval:
    """Deterministic adaptive-quadtree area bracket [low, high].

    Cells free of boundary segments are classified fully-in or fully-out by a
    center test; cells still straddling the boundary at ``min_cell_area`` are
    counted only toward the upper bound.  The true polygon area always lies
    inside the returned interval, which makes this usable as a tolerance-free
    oracle for the shoelace/boolean route.
    """
    if m.is_empty:
        return AreaInterval(0.0, 0.0)
    segs = _all_segments(m)
    x0, y0, x1, y1 = bounds(m)
    low = 0.0
    undecided = 0.0
    stack = [(x0, y0, x1, y1, segs)]
    while stack:
        cx0, cy0, cx1, cy1, cell_segs = stack.pop()
        cell_area = (cx1 - cx0) * (cy1 - cy0)
        if cell_area <= 0:
            continue
        keep = _segments_touching(cell_segs, cx0, cy0, cx1, cy1)
        if len(keep) == 0:
            center = np.array([[(cx0 + cx1) / 2.0, (cy0 + cy1) / 2.0]])
            if contains_many(m, center, boundary_eps=0.0)[0]:
                low += cell_area
            continue
        if cell_area <= min_cell_area:
            undecided += cell_area
            continue
        mx, my = (cx0 + cx1) / 2.0, (cy0 + cy1) / 2.0
        stack.extend([
            (cx0, cy0, mx, my, keep),
            (mx, cy0, cx1, my, keep),
            (cx0, my, mx, cy1, keep),
            (mx, my, cx1, cy1, keep),
        ])
    return AreaInterval(low, low + undecided)


def _all_segments(m: MultiPolygon) -> np.ndarray:
    """(N, 4) array of segment endpoints (x1, y1, x2, y2) over all rings."""
    rows = []
    for ring in m.rings():
        v = ring.vertices
        rows.append(np.hstack([v, np.roll(v, -1, axis=0)]))
    return np.vstack(rows)


def _segments_touching(segs: np.ndarray, x0: float, y0: float, x1: float, y1: float
                       ) -> np.ndarray:
    """Segments whose bounding box overlaps the cell (sound over-selection)."""
    sx0 = np.minimum(segs[:, 0], segs[:, 2])
    sx1 = np.maximum(segs[:, 0], segs[:, 2])
    sy0 = np.minimum(segs[:, 1], segs[:, 3])
    sy1 = np.maximum(segs[:, 1], segs[:, 3])
    mask = (sx1 >= x0) & (sx0 <= x1) & (sy1 >= y0) & (sy0 <= y1)
    return segs[mask]
