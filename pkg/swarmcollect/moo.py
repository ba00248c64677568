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
"""Multi-objective optimisation building blocks.

All objectives are minimised. Populations are handled as arrays of
objective vectors of shape ``(n, k)`` along with an array of total
constraint violations of shape ``(n,)``, a zero violation meaning that the
member is feasible. Members are compared with constrained domination:

* a feasible member dominates an infeasible one;
* of two infeasible members, the one with the lower violation dominates;
* of two feasible members, one dominates the other if it is no worse in
  every objective and better in at least one.

Ties are always broken by the lowest member index, so that results do not
depend on the order in which evaluations complete.
"""

from __future__ import annotations

from collections.abc import Sequence
import math
from typing import Annotated, Any, Protocol

from annotated_types import Ge
import numpy as np
import numpy.typing as npt
import pandas as pd
from pydantic import BaseModel, ConfigDict

from .evaluator import ObjectiveVector, Solution


__all__ = [
    "ArchiveMember",
    "NondominatedSet",
    "ParetoArchive",
    "StepSnapshot",
    "build_archive",
    "compromise_index",
    "constrained_dominance",
    "crowding_distance",
    "environmental_selection",
    "evaluation_budget",
    "fast_nondominated_sort",
    "greedy_next_hover",
    "hypervolume",
    "nondominated_filter",
    "rank_and_crowding",
    "select_leader",
    "update_a",
    "woa_update",
]

OBJECTIVE_NAMES = ("teu", "aeg", "adg")
"""Names of the objectives, in vector order."""


class RandomSource(Protocol):
    """Source of uniform random numbers in ``[0, 1[``."""

    def random(self, size: int | None = None, /) -> Any:
        ...  # pragma: no cover


def _pareto_dominance(
    a: npt.NDArray[np.float64],
    b: npt.NDArray[np.float64],
    /,
) -> npt.NDArray[np.bool_]:
    """Get the Pareto domination matrix of the points of ``a`` over ``b``.

    :param a: Objective vectors, of shape ``(n, k)``.
    :param b: Objective vectors, of shape ``(m, k)``.
    :return: Matrix of shape ``(n, m)``.
    """
    no_worse = np.all(a[:, None, :] <= b[None, :, :], axis=2)
    better = np.any(a[:, None, :] < b[None, :, :], axis=2)
    return no_worse & better


def constrained_dominance(
    objectives: npt.ArrayLike,
    violations: npt.ArrayLike,
    /,
) -> npt.NDArray[np.bool_]:
    """Get the constrained domination matrix of a population.

    :param objectives: Objective vectors, of shape ``(n, k)``.
    :param violations: Violations, of shape ``(n,)``.
    :return: Matrix whose cell ``(i, j)`` is whether ``i`` dominates ``j``.
    """
    f = np.asarray(objectives, dtype=np.float64)
    v = np.asarray(violations, dtype=np.float64)
    feasible = v == 0

    pareto = _pareto_dominance(f, f)

    both_feasible = feasible[:, None] & feasible[None, :]
    feasible_first = feasible[:, None] & ~feasible[None, :]
    lower_violation = (
        ~feasible[:, None] & ~feasible[None, :] & (v[:, None] < v[None, :])
    )
    return (both_feasible & pareto) | feasible_first | lower_violation


def fast_nondominated_sort(
    objectives: npt.ArrayLike,
    violations: npt.ArrayLike,
    /,
) -> list[list[int]]:
    """Sort a population into non-dominated fronts.

    .. doctest::

        >>> fast_nondominated_sort(
        ...     [[1, 1, 1], [2, 2, 2], [1, 2, 3], [3, 1, 2]],
        ...     [0, 0, 0, 0],
        ... )
        [[0], [1, 2, 3]]

    :param objectives: Objective vectors, of shape ``(n, k)``.
    :param violations: Violations, of shape ``(n,)``.
    :return: Fronts, each being a list of member indexes in increasing
        order, the first front being the non-dominated one.
    """
    dominance = constrained_dominance(objectives, violations)
    counts = dominance.sum(axis=0)
    fronts: list[list[int]] = []
    current = [int(i) for i in np.flatnonzero(counts == 0)]
    while current:
        fronts.append(current)
        following: list[int] = []
        for i in current:
            for j in np.flatnonzero(dominance[i]):
                counts[j] -= 1
                if counts[j] == 0:
                    following.append(int(j))

        current = sorted(following)

    return fronts


def crowding_distance(objectives: npt.ArrayLike, /) -> npt.NDArray[np.float64]:
    """Get the crowding distance of the members of a front.

    Members at the boundary of any objective get an infinite distance.
    Objectives with no spread, or with a non-finite spread, do not
    contribute to the distances of other members.

    .. doctest::

        >>> crowding_distance([[1, 5], [2, 4], [3, 3], [4, 2], [5, 1]])
        array([inf,  1.,  1.,  1., inf])

    :param objectives: Objective vectors of the front, of shape ``(n, k)``.
    :return: Distances, of shape ``(n,)``.
    """
    f = np.asarray(objectives, dtype=np.float64)
    count = len(f)
    distances = np.zeros(count)
    if count <= 2:
        distances[:] = np.inf
        return distances

    for column in f.T:
        order = np.argsort(column, kind="stable")
        distances[order[0]] = np.inf
        distances[order[-1]] = np.inf
        spread = column[order[-1]] - column[order[0]]
        if not np.isfinite(spread) or spread <= 0:
            continue

        with np.errstate(invalid="ignore"):
            gaps = (column[order[2:]] - column[order[:-2]]) / spread

        distances[order[1:-1]] += np.where(np.isfinite(gaps), gaps, 0.0)

    return distances


def rank_and_crowding(
    objectives: npt.ArrayLike,
    violations: npt.ArrayLike,
    /,
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.float64]]:
    """Get the front rank and the crowding distance of every member.

    :param objectives: Objective vectors, of shape ``(n, k)``.
    :param violations: Violations, of shape ``(n,)``.
    :return: Ranks, starting at 0 for the first front, and crowding
        distances within the fronts.
    """
    f = np.asarray(objectives, dtype=np.float64)
    ranks = np.zeros(len(f), dtype=np.int64)
    crowding = np.zeros(len(f))
    for rank, front in enumerate(fast_nondominated_sort(f, violations)):
        ranks[front] = rank
        crowding[front] = crowding_distance(f[front])

    return ranks, crowding


def environmental_selection(
    objectives: npt.ArrayLike,
    violations: npt.ArrayLike,
    count: int,
    /,
) -> list[int]:
    """Select members by front rank, then by crowding distance.

    :param objectives: Objective vectors, of shape ``(n, k)``.
    :param violations: Violations, of shape ``(n,)``.
    :param count: Number of members to select.
    :return: Indexes of the selected members, best first.
    """
    ranks, crowding = rank_and_crowding(objectives, violations)
    order = sorted(
        range(len(ranks)),
        key=lambda i: (ranks[i], -crowding[i], i),
    )
    return order[:count]


def nondominated_filter(
    objectives: npt.ArrayLike,
    violations: npt.ArrayLike,
    /,
) -> list[int]:
    """Get the members of the first front.

    :param objectives: Objective vectors, of shape ``(n, k)``.
    :param violations: Violations, of shape ``(n,)``.
    :return: Indexes of the non-dominated members, in increasing order.
    """
    dominance = constrained_dominance(objectives, violations)
    return [int(i) for i in np.flatnonzero(~dominance.any(axis=0))]


def select_leader(
    ranks: npt.ArrayLike,
    crowding: npt.ArrayLike,
    /,
) -> int:
    """Select the leader of a population.

    The leader is the member of the first front with the highest crowding
    distance, ties being broken by the lowest index.

    :param ranks: Front rank of every member.
    :param crowding: Crowding distance of every member.
    :return: Index of the leader.
    """
    ranks = np.asarray(ranks)
    crowding = np.asarray(crowding, dtype=np.float64)
    best = np.flatnonzero(ranks == ranks.min())
    return int(best[np.argmax(crowding[best])])


def compromise_index(objectives: npt.ArrayLike, /) -> int:
    """Get the index of the compromise member of a set.

    Every objective is min-max scaled over the set, objectives with no
    spread scaling to 0, and the member with the lowest sum is chosen, ties
    being broken by the lowest index.

    .. doctest::

        >>> compromise_index([[0, 1], [1, 0]])
        0
        >>> compromise_index([[2, 2, 2], [1, 1, 1]])
        1

    :param objectives: Objective vectors, of shape ``(n, k)``.
    :return: Index of the compromise member.
    :raises ValueError: The set is empty.
    """
    f = np.asarray(objectives, dtype=np.float64)
    if f.ndim != 2 or not len(f):
        raise ValueError("Cannot choose a compromise in an empty set.")

    low = f.min(axis=0)
    spread = f.max(axis=0) - low
    with np.errstate(invalid="ignore", divide="ignore"):
        scaled = np.where(spread > 0, (f - low) / spread, 0.0)

    scores = scaled.sum(axis=1)
    scores = np.where(np.isnan(scores), np.inf, scores)
    return int(np.argmin(scores))


def update_a(i: int, i_max: int, /) -> float:
    """Get the convergence factor of an iteration.

    The factor decreases linearly from 2 to 0 over the iterations.

    .. doctest::

        >>> update_a(0, 50), update_a(25, 50), update_a(50, 50)
        (2.0, 1.0, 0.0)

    :param i: Iteration index.
    :param i_max: Number of iterations.
    :return: Factor.
    """
    if i_max <= 0:
        return 0.0

    return 2.0 * (1.0 - i / i_max)


def woa_update(
    position: npt.ArrayLike,
    leader: npt.ArrayLike,
    random_agent: npt.ArrayLike,
    a: float,
    rng: RandomSource,
    /,
    *,
    spiral_b: float = 1.0,
    lower: Any = 0.0,
    upper: Any = 1.0,
) -> npt.NDArray[np.float64]:
    """Move a whale agent.

    With equal probability, the agent either follows a spiral around the
    leader, or shrinks around a target. The ``A`` and ``C`` coefficients are
    drawn for every gene, and the target of a gene is the leader if its
    ``|A| < 1``, the random agent otherwise.

    Draws are taken from ``rng`` in this order: one array for ``A``, one
    array for ``C``, then single numbers for the choice of the movement and
    for the spiral parameter ``l``.

    :param position: Current position.
    :param leader: Position of the leader.
    :param random_agent: Position of a randomly chosen agent.
    :param a: Convergence factor, see :py:func:`update_a`.
    :param rng: Random generator.
    :param spiral_b: Constant defining the shape of the spiral.
    :param lower: Lower bounds of the position.
    :param upper: Upper bounds of the position.
    :return: New position, clamped to the bounds.
    """
    x = np.asarray(position, dtype=np.float64)
    best = np.asarray(leader, dtype=np.float64)
    other = np.asarray(random_agent, dtype=np.float64)

    big_a = 2 * a * np.asarray(rng.random(x.size)).reshape(x.shape) - a
    big_c = 2 * np.asarray(rng.random(x.size)).reshape(x.shape)
    tau = rng.random()
    ell = 2 * rng.random() - 1

    if tau < 0.5:
        target = np.where(np.abs(big_a) < 1, best, other)
        result = target - big_a * np.abs(big_c * target - x)
    else:
        result = (
            np.abs(best - x)
            * math.exp(spiral_b * ell)
            * math.cos(2 * math.pi * ell)
            + best
        )

    return np.clip(result, lower, upper)


def greedy_next_hover(
    deltas: npt.ArrayLike,
    best: npt.ArrayLike,
    /,
) -> int:
    """Choose the next hovering candidate to visit.

    Every objective change is normalised by the best value found so far for
    the same objective, and the candidate with the lowest sum is chosen,
    ties being broken by the lowest index.

    .. doctest::

        >>> greedy_next_hover([[2, 2, 2], [1, 1, 1]], [1, 1, 1])
        1

    :param deltas: Predicted change of every objective for every candidate,
        of shape ``(n, k)``.
    :param best: Best value found so far for every objective.
    :return: Index of the chosen candidate.
    """
    d = np.asarray(deltas, dtype=np.float64)
    scale = np.asarray(best, dtype=np.float64)
    scale = np.where(np.isfinite(scale) & (scale > 0), scale, 1.0)
    scores = (d / scale).sum(axis=1)
    scores = np.where(np.isnan(scores), np.inf, scores)
    return int(np.argmin(scores))


def evaluation_budget(
    num_candidates: int,
    population: int,
    iterations: int,
    /,
) -> int:
    """Get the number of evaluations of a whale optimisation run.

    The initial population is evaluated once, then every agent is evaluated
    once per iteration of every hovering step.

    :param num_candidates: Total number of hovering candidates.
    :param population: Number of agents.
    :param iterations: Number of iterations per hovering step.
    :return: Number of evaluations.
    """
    return population * (1 + num_candidates * iterations)


def _hypervolume_2d(points: npt.NDArray[np.float64], ref: Any, /) -> float:
    """Get the area dominated by points, within a reference point."""
    area = 0.0
    ceiling = ref[1]
    for x, y in points[np.lexsort((points[:, 1], points[:, 0]))]:
        if y < ceiling:
            area += (ref[0] - x) * (ceiling - y)
            ceiling = y

    return area


def hypervolume(points: npt.ArrayLike, reference: npt.ArrayLike, /) -> float:
    """Get the volume dominated by points, within a reference point.

    The volume is computed exactly, by slicing along the last objective.

    .. doctest::

        >>> hypervolume([[1, 1, 1]], [2, 2, 2])
        1.0

    :param points: Objective vectors, of shape ``(n, 3)``.
    :param reference: Reference point, worse than every point.
    :return: Hypervolume.
    :raises ValueError: A point is beyond the reference point.
    """
    p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    ref = np.asarray(reference, dtype=np.float64)
    if not len(p):
        return 0.0
    if np.any(~np.isfinite(p)) or np.any(p > ref):
        raise ValueError("Every point must be within the reference point.")

    levels = np.unique(p[:, 2])
    bounds = np.append(levels, ref[2])
    volume = 0.0
    for level, top in zip(levels, bounds[1:]):
        if top <= level:
            continue

        volume += _hypervolume_2d(p[p[:, 2] <= level, :2], ref) * (top - level)

    return float(volume)


class ArchiveMember(BaseModel):
    """Mission kept in a Pareto archive."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )
    """Model configuration."""

    solution: Solution
    """Decisions of the mission."""

    objectives: ObjectiveVector
    """Objectives of the mission."""

    violation: Annotated[float, Ge(0)]
    """Total normalised constraint violation."""

    rank: Annotated[int, Ge(0)] = 0
    """Front rank within the archive, starting at 0."""

    crowding: Annotated[float, Ge(0)] = 0.0
    """Crowding distance within the front."""

    @property
    def feasible(self, /) -> bool:
        """Whether the mission satisfies every constraint."""
        return self.violation == 0


class ParetoArchive(BaseModel):
    """Result of an optimisation run."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )
    """Model configuration."""

    engine: str
    """Name of the engine that produced the archive."""

    members: tuple[ArchiveMember, ...]
    """Missions of the archive, by rank then decreasing crowding."""

    evaluations: Annotated[int, Ge(0)] = 0
    """Number of evaluations used to produce the archive."""

    @property
    def feasible_members(self, /) -> tuple[ArchiveMember, ...]:
        """Members satisfying every constraint."""
        return tuple(m for m in self.members if m.feasible)

    @property
    def any_feasible(self, /) -> bool:
        """Whether the archive holds at least one feasible mission."""
        return any(m.feasible for m in self.members)

    def objectives_array(self, /) -> npt.NDArray[np.float64]:
        """Get the objectives of the members.

        :return: Array of shape ``(n, 3)``.
        """
        return np.array(
            [m.objectives.as_array() for m in self.members],
        ).reshape(-1, 3)

    def extremes(self, /) -> dict[str, ArchiveMember]:
        """Get the member minimising every objective.

        Feasible members are preferred; ties are broken by the lowest index.

        :return: Members, by objective name.
        """
        pool = self.feasible_members or self.members
        values = np.array([m.objectives.as_array() for m in pool])
        return {
            name: pool[int(np.argmin(values[:, column]))]
            for column, name in enumerate(OBJECTIVE_NAMES)
        }

    def to_frame(self, /) -> pd.DataFrame:
        """Get the members as a data frame.

        :return: Data frame with columns ``rank``, ``crowding``, ``teu``,
            ``aeg``, ``adg`` and ``violation``.
        """
        return pd.DataFrame(
            [
                {
                    "rank": m.rank,
                    "crowding": m.crowding,
                    "teu": m.objectives.teu,
                    "aeg": m.objectives.aeg,
                    "adg": m.objectives.adg,
                    "violation": m.violation,
                }
                for m in self.members
            ],
            columns=["rank", "crowding", "teu", "aeg", "adg", "violation"],
        )


class NondominatedSet:
    """Unbounded set of the feasible non-dominated missions met in a run.

    Entries carry an opaque payload, from which the mission can be
    rebuilt when the run is over.
    """

    __slots__ = ("keys", "objectives", "payloads")

    objectives: npt.NDArray[np.float64]
    """Objectives of the entries, of shape ``(n, k)``."""

    payloads: list[Any]
    """Payload of every entry."""

    keys: set[tuple[float, ...]]
    """Objective vectors of the entries, to ignore duplicates."""

    def __init__(self, num_objectives: int = 3, /) -> None:
        self.objectives = np.empty((0, num_objectives))
        self.payloads = []
        self.keys = set()

    def __len__(self, /) -> int:
        return len(self.payloads)

    def add(
        self,
        objectives: npt.ArrayLike,
        violations: npt.ArrayLike,
        payloads: Sequence[Any],
        /,
    ) -> int:
        """Add missions to the set, keeping the non-dominated ones.

        Infeasible missions, missions with infinite objectives and
        duplicates of known objective vectors are ignored. Only the new
        missions are compared with the entries, so that adding ``m``
        missions to ``n`` entries takes ``O(n * m)`` comparisons.

        :param objectives: Objectives of the missions, of shape ``(n, k)``.
        :param violations: Violations of the missions.
        :param payloads: Payload of every mission.
        :return: Number of missions that entered the set.
        """
        f = np.asarray(objectives, dtype=np.float64).reshape(
            -1,
            self.objectives.shape[1],
        )
        v = np.asarray(violations, dtype=np.float64).reshape(-1)
        usable = np.flatnonzero((v == 0) & np.all(np.isfinite(f), axis=1))
        if not len(usable):
            return 0

        chosen: list[int] = []
        batch_keys: set[tuple[float, ...]] = set()
        for i in nondominated_filter(f[usable], np.zeros(len(usable))):
            key = tuple(f[usable[i]].tolist())
            if key not in self.keys and key not in batch_keys:
                batch_keys.add(key)
                chosen.append(int(usable[i]))

        if not chosen:
            return 0

        newcomers = f[chosen]
        beaten = _pareto_dominance(self.objectives, newcomers).any(axis=0)
        entering = [i for i, b in zip(chosen, beaten) if not b]
        if not entering:
            return 0

        stale = _pareto_dominance(f[entering], self.objectives).any(axis=0)
        for row in self.objectives[stale]:
            self.keys.discard(tuple(row.tolist()))

        self.objectives = np.vstack([self.objectives[~stale], f[entering]])
        kept = [p for p, s in zip(self.payloads, stale) if not s]
        self.payloads = kept + [payloads[i] for i in entering]
        self.keys.update(tuple(f[i].tolist()) for i in entering)
        return len(entering)


class StepSnapshot(BaseModel):
    """State of a run after a hovering step."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    step: Annotated[int, Ge(0)]
    """Index of the step."""

    tuav: Annotated[int, Ge(0)]
    """T-UAV whose next candidate was optimised."""

    candidate: Annotated[int, Ge(0)]
    """Local index of the optimised candidate."""

    evaluations: Annotated[int, Ge(0)]
    """Number of evaluations so far."""

    archive_objectives: tuple[tuple[float, float, float], ...]
    """Objectives of the feasible non-dominated missions met so far."""


def build_archive(
    entries: Sequence[tuple[Solution, npt.ArrayLike, float]],
    capacity: int,
    /,
    *,
    engine: str,
    evaluations: int,
) -> ParetoArchive:
    """Build the archive of a run out of candidate missions.

    The archive holds the first front of the candidates, truncated to the
    capacity by crowding distance.

    :param entries: Solution, objectives and violation of every candidate.
    :param capacity: Maximum number of members.
    :param engine: Name of the engine.
    :param evaluations: Number of evaluations of the run.
    :return: Archive.
    """
    objectives = np.array([np.asarray(e[1]) for e in entries]).reshape(-1, 3)
    violations = np.array([e[2] for e in entries], dtype=np.float64)
    front = nondominated_filter(objectives, violations)

    # Identical missions may reach the front several times.
    unique: list[int] = []
    seen: set[tuple[float, ...]] = set()
    for i in front:
        key = (*objectives[i].tolist(), float(violations[i]))
        if key not in seen:
            seen.add(key)
            unique.append(i)

    crowding = crowding_distance(objectives[unique])
    order = sorted(range(len(unique)), key=lambda j: (-crowding[j], j))
    chosen = [unique[j] for j in order[:capacity]]
    final = crowding_distance(objectives[chosen])

    return ParetoArchive(
        engine=engine,
        members=tuple(
            ArchiveMember(
                solution=entries[i][0],
                objectives=ObjectiveVector.from_array(objectives[i]),
                violation=float(violations[i]),
                rank=0,
                crowding=float(final[j]),
            )
            for j, i in enumerate(chosen)
        ),
        evaluations=evaluations,
    )
