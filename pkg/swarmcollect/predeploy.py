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
"""Pre-deployment of UAV swarms.

Pre-deployment fixes everything that does not change during the
optimisation of the mission:

* Ground users are clustered into as many clusters as there are T-UAVs.
  The Voronoi diagram of the cluster centers splits the area into
  subregions, one per T-UAV.
* H-UAVs are placed at points shared by several subregions, and every
  T-UAV joins the swarm of its closest H-UAV within capacity.
* Ground users of every subregion are split into groups that a T-UAV can
  serve at once, and each group gets its Fermat point as a hovering
  candidate.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence
from itertools import combinations
import math
from os import PathLike
from pathlib import Path
from typing import Annotated, Self

from annotated_types import Ge, MinLen
from loguru import logger
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.optimize import linear_sum_assignment

from .exc import ConfigurationError
from .geometry import (
    Point2,
    VoronoiDiagram,
    assign_nearest,
    geometric_median,
    kmeans,
    pairwise_distances,
    voronoi,
)
from .scenario import (
    AreaBounds,
    Point3,
    Scenario,
    load_model,
    validate_scenario,
)


__all__ = [
    "ConnectionPlan",
    "Deployment",
    "FermatGroup",
    "HoverSlot",
    "SiteSelection",
    "assign_subregions",
    "group_gus",
    "load_deployment",
    "predeploy",
    "save_deployment",
    "select_swarm_sites",
]

DEFAULT_MAX_SUBSETS = 50_000
"""Number of site subsets above which the exhaustive search is replaced."""

Index = Annotated[int, Ge(0)]


class HoverSlot(BaseModel):
    """Hovering position of a T-UAV a ground user is connected to."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    swarm: Index
    """Index of the swarm of the T-UAV."""

    tuav: Index
    """Index of the T-UAV, among all T-UAVs."""

    hover: Index
    """Index of the hovering candidate, among those of the T-UAV."""


class ConnectionPlan(BaseModel):
    """Connection of every ground user to one hovering position."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    assignment: tuple[HoverSlot, ...]
    """Slot of every ground user, by ground user index."""

    def members(self, /) -> dict[HoverSlot, list[int]]:
        """Get the ground users connected to every slot.

        :return: Ground user indexes, by slot.
        """
        result: dict[HoverSlot, list[int]] = {}
        for gu, slot in enumerate(self.assignment):
            result.setdefault(slot, []).append(gu)

        return result

    def oversized(self, u_max: int, /) -> dict[HoverSlot, int]:
        """Get the slots serving more than a number of ground users.

        :param u_max: Maximum number of ground users per slot.
        :return: Number of ground users of every oversized slot.
        """
        counts = Counter(self.assignment)
        return {slot: n for slot, n in counts.items() if n > u_max}


class FermatGroup(BaseModel):
    """Group of ground users served at one hovering candidate."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    point: Point2
    """Fermat point of the group, i.e. the hovering candidate."""

    members: Annotated[tuple[Index, ...], MinLen(1)]
    """Indexes of the ground users of the group, in increasing order."""


class SiteSelection(BaseModel):
    """Swarm sites chosen among candidate points."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    candidates: tuple[int, ...]
    """Indexes of the chosen candidates, in increasing order."""

    sites: tuple[Point2, ...]
    """Chosen sites, in the order of :py:attr:`candidates`."""

    assignment: tuple[Index, ...]
    """Site index of every cluster center."""

    cost: Annotated[float, Ge(0)]
    """Sum of the distances of the centers to their sites."""


class Deployment(BaseModel):
    """Result of the pre-deployment of the swarms.

    The T-UAV of index ``m`` serves the subregion of the cluster center of
    the same index.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    swarm_sites: Annotated[tuple[Point3, ...], MinLen(1)]
    """Site of every H-UAV."""

    centers: Annotated[tuple[Point2, ...], MinLen(1)]
    """Cluster centers, one per T-UAV."""

    tuav_swarms: tuple[Index, ...]
    """Swarm of every T-UAV."""

    tuav_subregions: tuple[Index, ...]
    """Subregion served by every T-UAV."""

    fermat_candidates: tuple[tuple[FermatGroup, ...], ...]
    """Hovering candidates of every T-UAV."""

    connections: ConnectionPlan
    """Connection of every ground user."""

    diagram: VoronoiDiagram
    """Voronoi diagram of the cluster centers."""

    @model_validator(mode="after")
    def _validate(self, /) -> Self:
        """Check that the fields are consistent with one another."""
        count = len(self.centers)
        if len(self.tuav_swarms) != count:
            raise ValueError("Expected one swarm per T-UAV.")
        if len(self.tuav_subregions) != count:
            raise ValueError("Expected one subregion per T-UAV.")
        if len(self.fermat_candidates) != count:
            raise ValueError("Expected hovering candidates for every T-UAV.")
        if any(s >= len(self.swarm_sites) for s in self.tuav_swarms):
            raise ValueError("T-UAV swarm index out of range.")

        for gu, slot in enumerate(self.connections.assignment):
            if (
                slot.tuav >= count
                or slot.swarm != self.tuav_swarms[slot.tuav]
                or slot.hover >= len(self.fermat_candidates[slot.tuav])
                or gu
                not in self.fermat_candidates[slot.tuav][slot.hover].members
            ):
                raise ValueError(f"Inconsistent connection of GU {gu}.")

        return self

    @property
    def num_tuavs(self, /) -> int:
        """Total number of T-UAVs."""
        return len(self.centers)

    @property
    def allocation(self, /) -> tuple[int, ...]:
        """Number of T-UAVs of every swarm."""
        counts = Counter(self.tuav_swarms)
        return tuple(counts.get(s, 0) for s in range(len(self.swarm_sites)))

    def swarm_members(self, swarm: int, /) -> list[int]:
        """Get the T-UAVs of a swarm.

        :param swarm: Index of the swarm.
        :return: Indexes of the T-UAVs, in increasing order.
        """
        return [m for m, s in enumerate(self.tuav_swarms) if s == swarm]

    def site_of(self, tuav: int, /) -> Point3:
        """Get the site of the swarm of a T-UAV.

        :param tuav: Index of the T-UAV.
        :return: Site of the H-UAV.
        """
        return self.swarm_sites[self.tuav_swarms[tuav]]


def assign_subregions(
    points: npt.ArrayLike,
    centers: Sequence[Point2] | npt.ArrayLike,
    /,
) -> npt.NDArray[np.int64]:
    """Get the subregion of every point.

    A point belongs to the Voronoi subregion of its nearest center, points
    on a boundary belonging to the subregion of lowest index.

    :param points: Horizontal positions, of shape ``(n, 2)``.
    :param centers: Cluster centers.
    :return: Subregion index of every point.
    """
    if not isinstance(centers, np.ndarray):
        centers = np.array(
            [c.as_array() if hasattr(c, "as_array") else c for c in centers],
        )

    return assign_nearest(np.asarray(points)[:, :2], centers)


def _assign_centers(
    centers: npt.NDArray[np.float64],
    sites: npt.NDArray[np.float64],
    m_max: int,
    /,
) -> tuple[float, npt.NDArray[np.int64]]:
    """Assign centers to sites, each site taking at most ``m_max`` centers.

    :return: Total distance, and site index of every center.
    """
    slots = np.repeat(pairwise_distances(centers, sites), m_max, axis=1)
    rows, cols = linear_sum_assignment(slots)
    assignment = np.empty(len(centers), dtype=np.int64)
    assignment[rows] = cols // m_max
    return float(slots[rows, cols].sum()), assignment


def _refine_by_swaps(
    chosen: list[int],
    centers: npt.NDArray[np.float64],
    candidates: npt.NDArray[np.float64],
    m_max: int,
    /,
) -> list[int]:
    """Improve a site subset by swapping one site at a time."""
    best, _ = _assign_centers(centers, candidates[sorted(chosen)], m_max)
    improved = True
    while improved:
        improved = False
        for position in range(len(chosen)):
            for vertex in range(len(candidates)):
                if vertex in chosen:
                    continue

                trial = chosen.copy()
                trial[position] = vertex
                cost, _ = _assign_centers(
                    centers,
                    candidates[sorted(trial)],
                    m_max,
                )
                if cost < best:
                    best, chosen, improved = cost, trial, True

    return sorted(chosen)


def _greedy_sites(
    centers: npt.NDArray[np.float64],
    candidates: npt.NDArray[np.float64],
    num_swarms: int,
    m_max: int,
    /,
) -> list[int]:
    """Choose sites by greedy addition followed by swap refinement."""
    distances = pairwise_distances(centers, candidates)
    chosen: list[int] = []
    closest = np.full(len(centers), np.inf)
    for _ in range(num_swarms):
        costs = [
            (
                np.minimum(closest, distances[:, v]).sum()
                if v not in chosen
                else np.inf
            )
            for v in range(len(candidates))
        ]
        vertex = int(np.argmin(costs))
        chosen.append(vertex)
        closest = np.minimum(closest, distances[:, vertex])

    return _refine_by_swaps(chosen, centers, candidates, m_max)


def select_swarm_sites(
    diagram: VoronoiDiagram,
    centers: Sequence[Point2] | npt.ArrayLike,
    num_swarms: int,
    m_max: int,
    /,
    *,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
) -> SiteSelection:
    """Choose the sites of the H-UAVs among the vertices of a diagram.

    The chosen subset minimises the sum of the distances of the cluster
    centers to their sites, every site taking at most ``m_max`` centers.
    Subsets are enumerated in lexicographic order and only a strictly
    better subset replaces the current one. When there are more than
    ``max_subsets`` subsets, sites are chosen greedily then refined by
    swaps.

    When the diagram has fewer vertices than swarms, which only occurs
    with very few clusters, the cluster centers are added as candidates.

    :param diagram: Voronoi diagram of the cluster centers.
    :param centers: Cluster centers.
    :param num_swarms: Number of sites to choose.
    :param m_max: Maximum number of centers per site.
    :param max_subsets: Maximum number of subsets to enumerate.
    :return: Selection.
    :raises ConfigurationError: The centers cannot be assigned within
        capacity, or there are not enough candidates.
    """
    if not isinstance(centers, np.ndarray):
        centers = np.array(
            [c.as_array() if hasattr(c, "as_array") else c for c in centers],
        )

    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    if len(centers) > num_swarms * m_max:
        raise ConfigurationError(
            violations=[
                f"{len(centers)} T-UAVs cannot join {num_swarms} swarm(s) "
                + f"of at most {m_max} T-UAV(s)",
            ],
        )

    candidates = diagram.vertices_array()
    if len(candidates) < num_swarms:
        candidates = np.vstack([candidates, centers])
    if len(candidates) < num_swarms:
        raise ConfigurationError(
            violations=[
                f"only {len(candidates)} candidate site(s) for "
                + f"{num_swarms} swarm(s)",
            ],
        )

    if math.comb(len(candidates), num_swarms) > max_subsets:
        logger.debug(
            "Choosing {} site(s) among {} candidates greedily.",
            num_swarms,
            len(candidates),
        )
        chosen = _greedy_sites(centers, candidates, num_swarms, m_max)
        cost, assignment = _assign_centers(
            centers,
            candidates[chosen],
            m_max,
        )
    else:
        best: tuple[float, list[int], npt.NDArray[np.int64]] | None = None
        for subset in combinations(range(len(candidates)), num_swarms):
            cost, assignment = _assign_centers(
                centers,
                candidates[list(subset)],
                m_max,
            )
            if best is None or cost < best[0]:
                best = (cost, list(subset), assignment)

        assert best is not None
        cost, chosen, assignment = best

    return SiteSelection(
        candidates=tuple(chosen),
        sites=tuple(Point2.from_array(candidates[v]) for v in chosen),
        assignment=tuple(int(s) for s in assignment),
        cost=cost,
    )


def group_gus(
    points: npt.ArrayLike,
    ids: Sequence[int],
    u_max: int,
    seed: int,
    /,
) -> tuple[FermatGroup, ...]:
    """Split ground users into groups served at one hovering position.

    Ground users are clustered into ``ceil(n / u_max)`` groups. While a
    group is oversized, its member farthest from the group center is moved
    to the nearest group that is not full. Every group then gets its Fermat
    point as hovering candidate.

    .. doctest::

        >>> groups = group_gus([[0, 0], [1, 0], [0, 1]], [4, 7, 9], 6, 0)
        >>> [group.members for group in groups]
        [(4, 7, 9)]

    :param points: Horizontal positions of the ground users.
    :param ids: Indexes of the ground users in the scenario.
    :param u_max: Maximum number of ground users per group.
    :param seed: Seed of the clustering.
    :return: Groups, ordered by their lowest member.
    :raises ValueError: There are no ground users, or ``u_max`` is not
        positive.
    """
    if not len(ids):
        raise ValueError("Cannot group an empty set of ground users.")
    if u_max < 1:
        raise ValueError("u_max must be at least 1.")

    array = np.asarray(points, dtype=np.float64).reshape(len(ids), -1)[:, :2]

    k = math.ceil(len(ids) / u_max)
    if k == 1:
        labels = np.zeros(len(ids), dtype=np.int64)
        centers = array.mean(axis=0, keepdims=True)
    else:
        clusters = kmeans(array, k, seed)
        labels = np.array(clusters.labels, dtype=np.int64)
        centers = clusters.centers_array()

    while True:
        sizes = np.bincount(labels, minlength=k)
        oversized = np.flatnonzero(sizes > u_max)
        if not len(oversized):
            break

        group = int(oversized[0])
        members = np.flatnonzero(labels == group)
        gaps = np.linalg.norm(array[members] - centers[group], axis=1)
        moved = int(members[np.argmax(gaps)])
        open_groups = np.flatnonzero(sizes < u_max)
        to_open = np.linalg.norm(centers[open_groups] - array[moved], axis=1)
        labels[moved] = int(open_groups[np.argmin(to_open)])

    groups = []
    for group in range(k):
        members = np.flatnonzero(labels == group)
        if not len(members):
            continue

        groups.append(
            FermatGroup(
                point=geometric_median(array[members]),
                members=tuple(sorted(int(ids[i]) for i in members)),
            ),
        )

    return tuple(sorted(groups, key=lambda g: g.members[0]))


def _single_cell(center: Point2, bounds: AreaBounds, /) -> VoronoiDiagram:
    """Get the diagram of a single seed, i.e. the whole area."""
    return VoronoiDiagram(
        seeds=(center,),
        cells=(
            (
                Point2(x=bounds.x_min, y=bounds.y_min),
                Point2(x=bounds.x_max, y=bounds.y_min),
                Point2(x=bounds.x_max, y=bounds.y_max),
                Point2(x=bounds.x_min, y=bounds.y_max),
            ),
        ),
        vertices=(),
        bounds=bounds,
    )


def predeploy(
    scenario: Scenario,
    /,
    *,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
    kmeans_iters: int = 100,
) -> Deployment:
    """Pre-deploy the swarms over the ground users of a scenario.

    The result only depends on the scenario, including its seed.

    :param scenario: Scenario to pre-deploy swarms for.
    :param max_subsets: Maximum number of site subsets to enumerate.
    :param kmeans_iters: Maximum number of Lloyd iterations.
    :return: Deployment.
    :raises ConfigurationError: The scenario is invalid, or has fewer ground
        users than T-UAVs.
    """
    note = validate_scenario(scenario)
    if not note.valid:
        raise ConfigurationError(violations=note.violations)

    points = scenario.gu_positions[:, :2]
    if scenario.num_tuavs > len(points):
        raise ConfigurationError(
            violations=[
                f"num_tuavs={scenario.num_tuavs} exceeds the number of "
                + f"ground users ({len(points)})",
            ],
        )

    clusters = kmeans(points, scenario.num_tuavs, scenario.seed, kmeans_iters)
    if len(clusters.centers) > 1:
        diagram = voronoi(clusters.centers, scenario.bounds)
    else:
        diagram = _single_cell(clusters.centers[0], scenario.bounds)

    selection = select_swarm_sites(
        diagram,
        clusters.centers,
        scenario.num_swarms,
        scenario.m_max,
        max_subsets=max_subsets,
    )
    subregions = assign_subregions(points, clusters.centers)

    candidates: list[tuple[FermatGroup, ...]] = []
    slots: dict[int, HoverSlot] = {}
    for tuav in range(scenario.num_tuavs):
        members = np.flatnonzero(subregions == tuav)
        if not len(members):
            logger.warning("Subregion {} has no ground user.", tuav)
            candidates.append(())
            continue

        groups = group_gus(
            points[members],
            [int(i) for i in members],
            scenario.u_max,
            scenario.seed + tuav + 1,
        )
        candidates.append(groups)
        for hover, group in enumerate(groups):
            for gu in group.members:
                slots[gu] = HoverSlot(
                    swarm=selection.assignment[tuav],
                    tuav=tuav,
                    hover=hover,
                )

    deployment = Deployment(
        swarm_sites=tuple(
            Point3(x=site.x, y=site.y, z=scenario.bounds.huav_altitude)
            for site in selection.sites
        ),
        centers=clusters.centers,
        tuav_swarms=selection.assignment,
        tuav_subregions=tuple(range(scenario.num_tuavs)),
        fermat_candidates=tuple(candidates),
        connections=ConnectionPlan(
            assignment=tuple(slots[gu] for gu in range(len(points))),
        ),
        diagram=diagram,
    )
    logger.info(
        "Pre-deployed {} swarm(s) with allocation {} and {} hovering "
        + "candidate(s).",
        len(deployment.swarm_sites),
        deployment.allocation,
        sum(len(groups) for groups in deployment.fermat_candidates),
    )
    return deployment


def save_deployment(
    deployment: Deployment,
    path: str | PathLike[str],
    /,
) -> None:
    """Save a deployment as a JSON document.

    :param deployment: Deployment to save.
    :param path: Path of the file to write.
    """
    Path(path).write_text(deployment.model_dump_json(indent=2) + "\n")


def load_deployment(path: str | PathLike[str], /) -> Deployment:
    """Load a deployment from a JSON document.

    :param path: Path of the file to read.
    :return: Loaded deployment.
    :raises ScenarioDecodeError: The file is malformed.
    """
    return load_model(Deployment, Path(path).read_bytes())
