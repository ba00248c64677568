#!/usr/bin/env python
# *****************************************************************************
# Copyright (C) 2024 Thomas Touhey <thomas@touhey.fr>
#
# This software is governed by the CeCILL-C license under French law and
# abiding by the rules of distribution of free software. You can use, modify
# and/or redistribute the software under the terms of the CeCILL-C license
# as circulated by CEA, CNRS and INRIA at the following
# URL: https://cecill.info
#
# As a counterpart to the access to the source code and rights to copy, modify
# and redistribute granted by the license, users are provided only with a
# limited warranty and the software's author, the holder of the economic
# rights, and the successive licensors have only limited liability.
#
# In this respect, the user's attention is drawn to the risks associated with
# loading, using, modifying and/or developing or reproducing the software by
# the user in light of its specific status of free software, that may mean
# that it is complicated to manipulate, and that also therefore means that it
# is reserved for developers and experienced professionals having in-depth
# computer knowledge. Users are therefore encouraged to load and test the
# software's suitability as regards their requirements in conditions enabling
# the security of their systems and/or data to be ensured and, more generally,
# to use and operate it in the same conditions as regards security.
#
# The fact that you are presently reading this means that you have had
# knowledge of the CeCILL-C license and that you accept its terms.
# *****************************************************************************
"""Computational geometry primitives.

This module provides the distance and elevation computations used by the
channel model, the k-means clustering and bounded Voronoi diagram used to
split the area into subregions, and the geometric median used to place
hovering points.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Annotated, Any, Self

from annotated_types import Ge
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict
from scipy.spatial.distance import cdist
import shapely
from shapely.geometry import Polygon, box

from .exc import GeometryError
from .scenario import AreaBounds
from .utils import as_point, as_points, spawn_rng


__all__ = [
    "ClusterAssignment",
    "Point2",
    "VoronoiDiagram",
    "assign_nearest",
    "distance",
    "elevation_angle_deg",
    "fermat_objective",
    "geometric_median",
    "kmeans",
    "pairwise_distances",
    "voronoi",
]

VERTEX_TOLERANCE = 1e-6
"""Distance under which two polygon vertices are considered identical."""


class Point2(BaseModel):
    """Horizontal position, in meters."""

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    """Model configuration."""

    x: float
    """Abscissa."""

    y: float
    """Ordinate."""

    @classmethod
    def from_array(cls, value: npt.ArrayLike, /) -> Self:
        """Build a point out of an array of two coordinates.

        :param value: Coordinates.
        :return: Point.
        """
        x, y = np.asarray(value, dtype=np.float64)[:2]
        return cls(x=float(x), y=float(y))

    def as_array(self, /) -> npt.NDArray[np.float64]:
        """Get the coordinates as an array.

        :return: Array of shape ``(2,)``.
        """
        return np.array([self.x, self.y], dtype=np.float64)


def _points2(points: Sequence[Point2] | npt.ArrayLike, /) -> Any:
    """Get an array of horizontal positions.

    Three-dimensional points are projected on the horizontal plane.
    """
    if not isinstance(points, np.ndarray):
        points = [
            p.as_array() if hasattr(p, "as_array") else p for p in points
        ]

    array = np.asarray(points, dtype=np.float64)
    if array.ndim == 2 and array.shape[1] == 3:
        array = array[:, :2]

    return as_points(array, dim=2)


def distance(a: Any, b: Any, /) -> Any:
    """Get the Euclidean distance between points.

    Points may be models with an ``as_array()`` method, or arrays whose last
    axis holds the coordinates, in which case distances are computed
    element-wise with broadcasting.

    .. doctest::

        >>> from swarmcollect.scenario import Point3
        >>> distance(Point3(x=0, y=0, z=0), Point3(x=3, y=4, z=12))
        13.0

    :param a: First point or points.
    :param b: Second point or points.
    :return: Distance, or array of distances.
    """
    result = np.linalg.norm(as_point(a) - as_point(b), axis=-1)
    if np.ndim(result) == 0:
        return float(result)

    return result


def pairwise_distances(a: npt.ArrayLike, b: npt.ArrayLike, /) -> Any:
    """Get the distances between every point of two sets.

    :param a: Points of shape ``(n, d)``.
    :param b: Points of shape ``(m, d)``.
    :return: Distances of shape ``(n, m)``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return cdist(a.reshape(-1, a.shape[-1]), b.reshape(-1, b.shape[-1]))


def elevation_angle_deg(gu: Any, uav: Any, /) -> Any:
    """Get the elevation angle of a UAV as seen from a ground user.

    A UAV right above the ground user is seen at 90°.

    .. doctest::

        >>> elevation_angle_deg([0, 0, 0], [100, 0, 100])
        45.0

    :param gu: Position or positions of the ground user.
    :param uav: Position or positions of the UAV.
    :return: Elevation angle, in degrees.
    """
    delta = as_point(uav) - as_point(gu)
    horizontal = np.hypot(delta[..., 0], delta[..., 1])
    result = np.degrees(np.arctan2(delta[..., 2], horizontal))
    if np.ndim(result) == 0:
        return float(result)

    return result


def assign_nearest(
    points: npt.ArrayLike,
    centers: npt.ArrayLike,
    /,
) -> npt.NDArray[np.int64]:
    """Get the index of the nearest center of every point.

    Ties are broken in favour of the lowest center index.

    :param points: Points of shape ``(n, d)``.
    :param centers: Centers of shape ``(k, d)``.
    :return: Labels of shape ``(n,)``.
    """
    return np.argmin(pairwise_distances(points, centers), axis=1)


class ClusterAssignment(BaseModel):
    """Result of a k-means clustering."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    centers: tuple[Point2, ...]
    """Cluster centers."""

    labels: tuple[Annotated[int, Ge(0)], ...]
    """Cluster index of every point."""

    inertia: Annotated[float, Ge(0)]
    """Sum of the squared distances of the points to their centers."""

    inertia_history: tuple[float, ...] = ()
    """Inertia after initialisation and after every Lloyd iteration."""

    def centers_array(self, /) -> npt.NDArray[np.float64]:
        """Get the cluster centers as an array.

        :return: Array of shape ``(k, 2)``.
        """
        return np.array([c.as_array() for c in self.centers])

    def members(self, cluster: int, /) -> list[int]:
        """Get the indexes of the points of a cluster.

        :param cluster: Cluster index.
        :return: Point indexes, in increasing order.
        """
        return [i for i, label in enumerate(self.labels) if label == cluster]


def _inertia(
    points: npt.NDArray[np.float64],
    centers: npt.NDArray[np.float64],
    labels: npt.NDArray[np.int64],
    /,
) -> float:
    return float(np.sum((points - centers[labels]) ** 2))


def _kmeans_plusplus(
    points: npt.NDArray[np.float64],
    k: int,
    rng: np.random.Generator,
    /,
) -> npt.NDArray[np.float64]:
    """Pick initial centers with the k-means++ rule."""
    indexes = [int(rng.integers(len(points)))]
    closest = np.sum((points - points[indexes[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            index = int(rng.choice(len(points), p=closest / total))
        else:
            # Only duplicates of the chosen centers remain.
            index = next(i for i in range(len(points)) if i not in indexes)

        indexes.append(index)
        closest = np.minimum(
            closest,
            np.sum((points - points[index]) ** 2, axis=1),
        )

    return points[indexes].copy()


def kmeans(
    points: Sequence[Point2] | npt.ArrayLike,
    k: int,
    seed: int,
    max_iters: int = 100,
    /,
) -> ClusterAssignment:
    """Cluster points with Lloyd iterations from a k-means++ start.

    Iterations stop when the labels are stable or ``max_iters`` is reached.
    A cluster that becomes empty is reseeded at the point that is the
    farthest from its nearest center, which keeps the inertia
    non-increasing.

    .. doctest::

        >>> result = kmeans([[0, 0], [0, 1], [100, 0], [100, 1]], 2, 0)
        >>> result.labels[0] == result.labels[1] != result.labels[2]
        True

    :param points: Points to cluster; 3D points are projected.
    :param k: Number of clusters.
    :param seed: Seed of the initialisation.
    :param max_iters: Maximum number of Lloyd iterations.
    :return: Cluster assignment.
    :raises GeometryError: There are fewer points than clusters.
    """
    array = _points2(points)
    if k < 1 or k > len(array):
        raise GeometryError(
            f"Cannot make {k} cluster(s) out of {len(array)} point(s).",
        )

    centers = _kmeans_plusplus(array, k, spawn_rng(seed, k))
    labels = assign_nearest(array, centers)
    history = [_inertia(array, centers, labels)]

    for _ in range(max_iters):
        new_centers = centers.copy()
        for cluster in range(k):
            mask = labels == cluster
            if mask.any():
                new_centers[cluster] = array[mask].mean(axis=0)

        for cluster in range(k):
            if (labels == cluster).any():
                continue

            others = np.delete(new_centers, cluster, axis=0)
            farthest = int(np.argmax(pairwise_distances(array, others).min(1)))
            new_centers[cluster] = array[farthest]

        new_labels = assign_nearest(array, new_centers)
        centers = new_centers
        history.append(_inertia(array, centers, new_labels))
        if np.array_equal(new_labels, labels):
            break

        labels = new_labels

    return ClusterAssignment(
        centers=tuple(Point2.from_array(c) for c in centers),
        labels=tuple(int(label) for label in labels),
        inertia=_inertia(array, centers, labels),
        inertia_history=tuple(history),
    )


class VoronoiDiagram(BaseModel):
    """Voronoi diagram clipped to a rectangular area."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    seeds: tuple[Point2, ...]
    """Seeds of the diagram, i.e. the cluster centers."""

    cells: tuple[tuple[Point2, ...], ...]
    """Exterior ring of the cell of every seed, without closing point."""

    vertices: tuple[Point2, ...]
    """Points shared by at least two cells.

    These include the vertices of the diagram inside the area, and the
    points where the boundary between two cells crosses the area border.
    """

    bounds: AreaBounds
    """Bounds the cells are clipped to."""

    def polygon(self, index: int, /) -> Polygon:
        """Get the cell of a seed as a polygon.

        :param index: Index of the seed.
        :return: Polygon of the cell.
        """
        return Polygon([(p.x, p.y) for p in self.cells[index]])

    def cell_of(self, point: Any, /) -> int:
        """Get the index of the cell containing a point.

        Points on a boundary belong to the cell of the lowest index.

        :param point: Point to locate.
        :return: Index of the cell.
        """
        seeds = np.array([s.as_array() for s in self.seeds])
        position = as_point(point)[:2].reshape(1, 2)
        return int(assign_nearest(position, seeds)[0])

    @property
    def interior_vertices(self, /) -> tuple[Point2, ...]:
        """Vertices that are not on the border of the area."""
        b = self.bounds
        return tuple(
            v
            for v in self.vertices
            if b.x_min + VERTEX_TOLERANCE < v.x < b.x_max - VERTEX_TOLERANCE
            and b.y_min + VERTEX_TOLERANCE < v.y < b.y_max - VERTEX_TOLERANCE
        )

    def vertices_array(self, /) -> npt.NDArray[np.float64]:
        """Get the vertices as an array.

        :return: Array of shape ``(n, 2)``.
        """
        return np.array([v.as_array() for v in self.vertices]).reshape(-1, 2)


def _half_plane(
    seed: npt.NDArray[np.float64],
    other: npt.NDArray[np.float64],
    extent: float,
    /,
) -> Polygon:
    """Get the half-plane of points closer to a seed than to another."""
    middle = (seed + other) / 2
    normal = (other - seed) / np.linalg.norm(other - seed)
    tangent = np.array([-normal[1], normal[0]])
    return Polygon(
        [
            middle + tangent * extent,
            middle + tangent * extent - normal * extent,
            middle - tangent * extent - normal * extent,
            middle - tangent * extent,
        ],
    )


def voronoi(
    seeds: Sequence[Point2] | npt.ArrayLike,
    bounds: AreaBounds,
    /,
) -> VoronoiDiagram:
    """Build the Voronoi diagram of seeds, clipped to the area.

    Every cell is obtained as the intersection of the area with the
    half-planes closer to its seed than to each other seed.

    .. doctest::

        >>> from swarmcollect.scenario import AreaBounds
        >>> bounds = AreaBounds(x_max=2, y_max=2)
        >>> diagram = voronoi([[0.5, 0.5], [1.5, 0.5], [0.5, 1.5],
        ...                    [1.5, 1.5]], bounds)
        >>> [(round(v.x, 9), round(v.y, 9))
        ...  for v in diagram.interior_vertices]
        [(1.0, 1.0)]

    :param seeds: Seeds of the diagram.
    :param bounds: Bounds of the area.
    :return: Clipped diagram.
    :raises GeometryError: There are fewer than two seeds, duplicate
        seeds, or seeds outside of the area.
    """
    array = _points2(seeds)
    if len(array) < 2:
        raise GeometryError("At least two seeds are required.")

    for i, (x, y) in enumerate(array):
        if not bounds.contains_xy(x, y):
            raise GeometryError(f"Seed {i} at ({x}, {y}) is outside the area.")

    gaps = pairwise_distances(array, array)
    np.fill_diagonal(gaps, np.inf)
    if gaps.min() <= VERTEX_TOLERANCE:
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        raise GeometryError(f"Seeds {min(i, j)} and {max(i, j)} coincide.")

    area = box(bounds.x_min, bounds.y_min, bounds.x_max, bounds.y_max)
    extent = 4 * bounds.diagonal
    cells: list[tuple[Point2, ...]] = []
    rings: list[npt.NDArray[np.float64]] = []
    for i, seed in enumerate(array):
        cell = area
        for j, other in enumerate(array):
            if i != j:
                cell = cell.intersection(_half_plane(seed, other, extent))

        cell = shapely.normalize(cell.simplify(0.0))
        if not isinstance(cell, Polygon) or cell.is_empty:
            raise GeometryError(f"Cell {i} is degenerate.")

        ring = np.asarray(cell.exterior.coords)[:-1]
        rings.append(ring)
        cells.append(tuple(Point2.from_array(p) for p in ring))

    # Keep the points found in the rings of at least two distinct cells.
    found: list[npt.NDArray[np.float64]] = []
    owners: list[set[int]] = []
    for i, ring in enumerate(rings):
        for point in ring:
            for index, known in enumerate(found):
                if np.linalg.norm(known - point) <= VERTEX_TOLERANCE:
                    owners[index].add(i)
                    break
            else:
                found.append(point)
                owners.append({i})

    shared = sorted(
        (
            (round(float(p[0]), 6), round(float(p[1]), 6), index)
            for index, p in enumerate(found)
            if len(owners[index]) >= 2
        ),
    )

    return VoronoiDiagram(
        seeds=tuple(Point2.from_array(s) for s in array),
        cells=tuple(cells),
        vertices=tuple(
            Point2.from_array(found[index]) for _, _, index in shared
        ),
        bounds=bounds,
    )


def fermat_objective(
    points: npt.ArrayLike,
    candidate: npt.ArrayLike,
    /,
) -> Any:
    """Get the sum of distances from a candidate to points.

    :param points: Points of shape ``(n, 2)``.
    :param candidate: Candidate of shape ``(2,)``, or candidates of shape
        ``(m, 2)``.
    :return: Sum of distances, or one sum per candidate.
    """
    distances = pairwise_distances(candidate, points)
    result = distances.sum(axis=1)
    if np.ndim(candidate) == 1:
        return float(result[0])

    return result


def geometric_median(
    points: Sequence[Point2] | npt.ArrayLike,
    tol: float = 1e-10,
    max_iters: int = 10_000,
    /,
) -> Point2:
    """Get the point minimising the sum of distances to the given points.

    This runs Weiszfeld iterations with the modification for iterates
    falling on an input point, then returns the best of the last iterate,
    the input points and their centroid.

    .. doctest::

        >>> p = geometric_median([[0, 0], [1, 0], [2, 0]])
        >>> round(p.x, 6), round(p.y, 6)
        (1.0, 0.0)

    :param points: Points to get the geometric median of.
    :param tol: Step length under which iterations stop, in meters.
    :param max_iters: Maximum number of iterations.
    :return: Geometric median.
    :raises GeometryError: No points were provided.
    """
    array = _points2(points)
    if not len(array):
        raise GeometryError("Cannot get the median of an empty set.")
    if tol <= 0:
        raise ValueError("Tolerance must be positive.")
    if len(array) == 1:
        return Point2.from_array(array[0])

    centroid = array.mean(axis=0)
    current = centroid.copy()
    for _ in range(max_iters):
        gaps = np.linalg.norm(array - current, axis=1)
        far = gaps > 0
        coincident = int((~far).sum())
        weights = 1.0 / gaps[far]
        target = (weights[:, None] * array[far]).sum(0) / weights.sum()

        if coincident:
            pull = (weights[:, None] * (array[far] - current)).sum(0)
            strength = float(np.linalg.norm(pull))
            if strength <= coincident:
                # The coincident point is optimal.
                break

            ratio = coincident / strength
            target = (1 - ratio) * target + ratio * current

        step = float(np.linalg.norm(target - current))
        current = target
        if step < tol:
            break

    candidates = np.vstack([current, array, centroid])
    best = int(np.argmin(fermat_objective(array, candidates)))
    return Point2.from_array(candidates[best])
