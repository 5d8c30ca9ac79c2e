# utils/geometry.py
"""
Planar primitives and the disk partition used for route selection.

Cells are never materialized as polygons. A point belongs to the cell of
its nearest site, ties going to the lowest site index, and every query
below reduces to site-distance comparisons.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import ConvexHull, cKDTree
from scipy.spatial.distance import pdist

from utils.errors import OutsideRegionError, ParameterError, SamplingStarvedError

logger = logging.getLogger(__name__)

# Relative distance slack under which two sites count as equidistant.
TIE_RTOL = 1e-12
# Parameter tolerance of the nearest-site bisection along a segment.
BISECT_TOL = 1e-12
# Points this far outside the disk (relative to its radius) are still accepted.
REGION_RTOL = 1e-9


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point


@dataclass(frozen=True)
class Disk:
    """Disk centered at the origin."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise ParameterError(f"disk radius must be positive and finite, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, p, rtol: float = REGION_RTOL) -> bool:
        return math.hypot(p[0], p[1]) <= self.radius * (1.0 + rtol)


def sample_disk(radius: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the disk by polar inversion (r = R*sqrt(U))."""
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * np.pi * rng.random(count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


@dataclass(frozen=True, eq=False)
class Partition:
    """
    Generator sites on a disk; the induced nearest-site cells are convex.

    Attributes:
        sites: (M, 2) array of site coordinates, read-only
        u: ring spacing of the construction
        w: scale the construction was asked for
        radius: radius of the partitioned disk
    """

    sites: np.ndarray
    u: float
    w: float
    radius: float

    def __post_init__(self):
        sites = np.array(self.sites, dtype=float).reshape(-1, 2)
        if len(sites) == 0:
            raise ParameterError("a partition needs at least one site")
        sites.setflags(write=False)
        object.__setattr__(self, "sites", sites)

    @property
    def cell_count(self) -> int:
        return len(self.sites)

    @property
    def disk(self) -> Disk:
        return Disk(self.radius)

    @property
    def max_cell_diameter(self) -> float:
        # every point is within 2u of its site
        return 4.0 * self.u

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.sites)

    @cached_property
    def _neighbor_cache(self) -> dict[int, np.ndarray]:
        return {}

    def neighbor_candidates(self, index: int) -> np.ndarray:
        """Sites that can share a cell boundary with ``index`` (all sites within 4u)."""
        cached = self._neighbor_cache.get(index)
        if cached is None:
            found = self.tree.query_ball_point(self.sites[index], 4.0 * self.u * (1.0 + 1e-9))
            cached = np.array(sorted(j for j in found if j != index), dtype=np.intp)
            self._neighbor_cache[index] = cached
        return cached


def build_disk_partition(radius: float, w: float) -> Partition:
    """
    Sites whose Voronoi cells have diameter <= 4u <= 8w and area >= w^2/8.

    One site at the center, a regular hexagon of side u on the first ring,
    and on ring d >= 2 (radius d*u) points stepped by chord u/2 until the
    next step would come within u/2 of the ring's first point, which is
    then dropped. The closing chord therefore lies in (u/2, u].
    """
    if not w > 0:
        raise ParameterError(f"partition scale w must be positive, got {w}")
    if radius < 2 * w:
        raise ParameterError(f"partition needs radius >= 2w (radius={radius}, w={w})")

    m = int(math.floor(radius / w - 0.5))
    u = radius / (m + 0.5)

    rings = [np.zeros((1, 2))]
    hexagon = np.arange(6) * (math.pi / 3.0)
    rings.append(u * np.column_stack((np.cos(hexagon), np.sin(hexagon))))
    for d in range(2, m + 1):
        theta = 2.0 * math.asin(1.0 / (4.0 * d))
        count = math.ceil(2.0 * math.pi / theta - 1.0)
        angles = theta * np.arange(count)
        rings.append(d * u * np.column_stack((np.cos(angles), np.sin(angles))))

    partition = Partition(sites=np.vstack(rings), u=u, w=w, radius=radius)
    logger.debug(
        "partition radius=%.6g w=%.6g -> m=%d u=%.6g sites=%d",
        radius, w, m, u, partition.cell_count,
    )
    return partition


def _nearest(partition: Partition, points: np.ndarray) -> np.ndarray:
    """Nearest-site index per row of ``points`` with the lowest-index tie rule."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k = min(6, partition.cell_count)
    if k == 1:
        return np.zeros(len(points), dtype=np.intp)
    dists, idx = partition.tree.query(points, k=k)
    tied = dists <= dists[:, :1] * (1.0 + TIE_RTOL)
    return np.where(tied, idx, partition.cell_count).min(axis=1).astype(np.intp)


def _check_inside(partition: Partition, points: np.ndarray) -> None:
    norms = np.hypot(points[:, 0], points[:, 1])
    outside = norms > partition.radius * (1.0 + REGION_RTOL)
    if outside.any():
        first = points[np.argmax(outside)]
        raise OutsideRegionError(
            f"point ({first[0]:.6g}, {first[1]:.6g}) lies outside the disk of radius {partition.radius:.6g}"
        )


def cell_of(partition: Partition, p) -> int:
    point = np.asarray(p, dtype=float).reshape(1, 2)
    _check_inside(partition, point)
    return int(_nearest(partition, point)[0])


def cells_of(partition: Partition, points) -> np.ndarray:
    """Vectorized :func:`cell_of` over a (k, 2) array."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        return np.zeros(0, dtype=np.intp)
    _check_inside(partition, points)
    return _nearest(partition, points)


def _bisect_exit(partition: Partition, current: int, a: np.ndarray, d: np.ndarray, lo: float):
    """Smallest t in [lo, 1] whose nearest site is not ``current``, or None."""
    hi = 1.0
    if _nearest(partition, a + hi * d)[0] == current:
        return None
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if _nearest(partition, a + mid * d)[0] == current:
            lo = mid
        else:
            hi = mid
    return hi, int(_nearest(partition, a + hi * d)[0])


def _next_crossing(partition: Partition, current: int, a, d, t: float, visited: set[int]):
    """
    Exit parameter of the segment a + t*d from the cell of ``current``.

    Along the segment, |P(t) - s_j|^2 - |P(t) - s_c|^2 is linear in t, so
    the crossing of every bisector is solved exactly. Among crossings that
    coincide (a Voronoi vertex) the site that gets closest fastest wins.
    """
    candidates = partition.neighbor_candidates(current)
    if visited:
        candidates = candidates[~np.isin(candidates, list(visited))]
    if len(candidates) == 0:
        return _bisect_exit(partition, current, a, d, t)

    sc = partition.sites[current]
    diff = partition.sites[candidates] - sc
    intercept = np.einsum("ij,ij->i", diff, partition.sites[candidates] + sc - 2.0 * a)
    slope = -2.0 * (diff @ d)

    approaching = slope < 0
    if not approaching.any():
        return _bisect_exit(partition, current, a, d, t)
    crossing = -intercept[approaching] / slope[approaching]
    ahead = crossing > t - BISECT_TOL
    if not ahead.any():
        return _bisect_exit(partition, current, a, d, t)

    crossing = np.maximum(crossing[ahead], t)
    slopes = slope[approaching][ahead]
    names = candidates[approaching][ahead]
    t_exit = crossing.min()
    if t_exit >= 1.0:
        return None
    tied = crossing <= t_exit + BISECT_TOL
    # lexsort: last key is primary
    best = np.lexsort((names[tied], slopes[tied]))[0]
    return float(t_exit), int(names[tied][best])


def cells_intersected(partition: Partition, seg: Segment) -> list[int]:
    """Cells crossed by ``seg`` from a to b, each listed once, in traversal order."""
    a = np.asarray(seg[0], dtype=float)
    b = np.asarray(seg[1], dtype=float)
    _check_inside(partition, np.vstack((a, b)))

    current = int(_nearest(partition, a)[0])
    if np.array_equal(a, b):
        return [current]

    d = b - a
    sequence = [current]
    visited = {current}
    t = 0.0
    while True:
        step = _next_crossing(partition, current, a, d, t, visited)
        if step is None:
            break
        t, current = step
        if current in visited:
            break
        sequence.append(current)
        visited.add(current)
    return sequence


@dataclass(frozen=True)
class CellStats:
    index: int
    hits: int
    area: float
    area_stderr: float
    diameter: float


def _diameter(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    if len(points) > 3:
        try:
            points = points[ConvexHull(points).vertices]
        except (RuntimeError, ValueError):
            # collinear or repeated samples, fall back to all pairs
            pass
    return float(pdist(points).max())


def _sample_cells(partition: Partition, samples: int, seed):
    if samples < 1000:
        raise ParameterError(f"cell statistics need at least 1000 samples, got {samples}")
    rng = np.random.default_rng(seed)
    points = sample_disk(partition.radius, samples, rng)
    return points, _nearest(partition, points)


def _stats_for(partition: Partition, index: int, mine: np.ndarray, samples: int) -> CellStats:
    fraction = len(mine) / samples
    area = partition.disk.area
    return CellStats(
        index=index,
        hits=len(mine),
        area=fraction * area,
        area_stderr=area * math.sqrt(fraction * (1.0 - fraction) / samples),
        diameter=_diameter(mine),
    )


def cell_stats(partition: Partition, index: int, samples: int, seed) -> CellStats:
    """
    Monte Carlo area and diameter of one cell.

    Both are underestimates of the true values, which is what one-sided
    checks against the partition guarantees need.
    """
    if not 0 <= index < partition.cell_count:
        raise ParameterError(f"no cell {index} in a partition of {partition.cell_count}")
    points, cells = _sample_cells(partition, samples, seed)
    stats = _stats_for(partition, index, points[cells == index], samples)
    if stats.hits == 0:
        raise SamplingStarvedError(f"cell sampling starved for cell {index}; raise samples above {samples}")
    return stats


def partition_stats(partition: Partition, samples: int, seed) -> list[CellStats]:
    """:func:`cell_stats` for every cell from a single batch of samples."""
    points, cells = _sample_cells(partition, samples, seed)
    order = np.argsort(cells, kind="stable")
    bounds = np.searchsorted(cells[order], np.arange(partition.cell_count + 1))
    return [
        _stats_for(partition, index, points[order[bounds[index]:bounds[index + 1]]], samples)
        for index in range(partition.cell_count)
    ]


def min_site_spacing(sites: Sequence) -> float:
    """Smallest distance between two of the points, inf for fewer than two."""
    sites = np.asarray(sites, dtype=float).reshape(-1, 2)
    if len(sites) < 2:
        return math.inf
    distances, _ = cKDTree(sites).query(sites, k=2)
    return float(distances[:, 1].min())
