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
"""Encoding of missions as real vectors.

Optimisation engines work on vectors in the unit hypercube, every gene
being mapped linearly to the range of the decision it encodes:

* three genes per hovering candidate, for the altitude and the horizontal
  offset to the Fermat point of the candidate;
* one gene per ground user, for its transmit power;
* one gene per T-UAV, for its transmit power;
* optionally, one random key per hovering candidate, the visiting order of
  the candidates of a T-UAV being the order of their keys.
"""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import Executor

import numpy as np
import numpy.typing as npt

from .evaluator import MissionEvaluator, Solution
from .geometry import pairwise_distances


__all__ = ["MissionLayout", "nearest_neighbour_order"]


def nearest_neighbour_order(
    start: npt.ArrayLike,
    points: npt.NDArray[np.float64],
    prefix: Sequence[int] = (),
    /,
) -> list[int]:
    """Complete a visiting order by going to the nearest point each time.

    .. doctest::

        >>> import numpy as np
        >>> nearest_neighbour_order([0, 0], np.array([[5, 0], [1, 0], [3, 0]]))
        [1, 2, 0]

    :param start: Horizontal start position.
    :param points: Horizontal positions of the points to visit.
    :param prefix: Points already visited, in order.
    :return: Complete visiting order, starting with the prefix.
    """
    order = list(prefix)
    remaining = [n for n in range(len(points)) if n not in order]
    position = (
        points[order[-1]] if order else np.asarray(start, dtype=np.float64)[:2]
    )
    while remaining:
        gaps = pairwise_distances(position[None, :2], points[remaining])[0]
        nearest = remaining.pop(int(np.argmin(gaps)))
        order.append(nearest)
        position = points[nearest]

    return order


class MissionLayout:
    """Layout of the vectors encoding missions over a deployment.

    :param evaluator: Evaluator of the missions.
    :param offset_radius: Largest horizontal offset of a hovering position
        to its Fermat point, in meters.
    :param with_keys: Whether vectors carry random keys for the orderings.
    """

    __slots__ = (
        "evaluator",
        "gu_offset",
        "key_offset",
        "offset_radius",
        "relay_offset",
        "size",
        "with_keys",
    )

    evaluator: MissionEvaluator
    """Evaluator of the missions."""

    offset_radius: float
    """Largest horizontal offset to the Fermat points, in meters."""

    with_keys: bool
    """Whether vectors carry random keys."""

    size: int
    """Number of genes of a vector."""

    def __init__(
        self,
        evaluator: MissionEvaluator,
        /,
        *,
        offset_radius: float = 50.0,
        with_keys: bool = False,
    ) -> None:
        self.evaluator = evaluator
        self.offset_radius = offset_radius
        self.with_keys = with_keys
        self.gu_offset = 3 * evaluator.num_candidates
        self.relay_offset = self.gu_offset + evaluator.num_gus
        self.key_offset = self.relay_offset + evaluator.num_tuavs
        self.size = self.key_offset + (
            evaluator.num_candidates if with_keys else 0
        )

    def step_indexes(self, candidate: int, /) -> npt.NDArray[np.int64]:
        """Get the genes decided when hovering at a candidate.

        These are the position genes of the candidate, the power genes of
        its ground users, and the power gene of its T-UAV.

        :param candidate: Flat index of the candidate.
        :return: Gene indexes.
        """
        members = self.evaluator.candidate_members[candidate]
        tuav = int(self.evaluator.candidate_tuav[candidate])
        return np.concatenate(
            [
                np.arange(3 * candidate, 3 * candidate + 3),
                self.gu_offset + members,
                [self.relay_offset + tuav],
            ],
        ).astype(np.int64)

    def random(
        self,
        rng: np.random.Generator,
        count: int,
        /,
    ) -> npt.NDArray[np.float64]:
        """Draw vectors uniformly.

        :param rng: Random generator.
        :param count: Number of vectors.
        :return: Vectors, of shape ``(count, size)``.
        """
        return rng.random((count, self.size))

    def decode(
        self,
        x: npt.NDArray[np.float64],
        orderings: Sequence[Sequence[int]] | None = None,
        /,
    ) -> tuple[
        npt.NDArray[np.float64],
        list[list[int]],
        npt.NDArray[np.float64],
        npt.NDArray[np.float64],
    ]:
        """Decode a vector into the arrays of the evaluator.

        :param x: Vector.
        :param orderings: Orderings, required if the layout has no keys.
        :return: Hovering positions, orderings, ground user and relay
            powers.
        :raises ValueError: Orderings are missing.
        """
        evaluator = self.evaluator
        bounds = evaluator.scenario.bounds
        channel = evaluator.scenario.channel
        x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)

        genes = x[: self.gu_offset].reshape(-1, 3)
        hover = np.empty_like(genes)
        hover[:, 2] = bounds.tuav_z_min + genes[:, 0] * (
            bounds.tuav_z_max - bounds.tuav_z_min
        )
        hover[:, :2] = bounds.clip_xy(
            evaluator.candidate_points
            + (2 * genes[:, 1:] - 1) * self.offset_radius,
        )

        gu_powers = channel.p_u_min + x[self.gu_offset : self.relay_offset] * (
            channel.p_u_max - channel.p_u_min
        )
        relay_powers = channel.p_m_min + x[
            self.relay_offset : self.key_offset
        ] * (channel.p_m_max - channel.p_m_min)

        if orderings is None:
            if not self.with_keys:
                raise ValueError("Orderings are required without keys.")

            keys = x[self.key_offset :]
            orderings = [
                np.argsort(keys[list(index)], kind="stable").tolist()
                for index in evaluator.candidate_index
            ]

        return hover, [list(o) for o in orderings], gu_powers, relay_powers

    def encode(
        self,
        hover: npt.NDArray[np.float64],
        gu_powers: npt.NDArray[np.float64],
        relay_powers: npt.NDArray[np.float64],
        orderings: Sequence[Sequence[int]] | None = None,
        /,
    ) -> npt.NDArray[np.float64]:
        """Encode arrays of the evaluator into a vector.

        Hovering positions further than the offset radius from their Fermat
        points are brought back within the radius.

        :param hover: Hovering positions.
        :param gu_powers: Transmit power of every ground user.
        :param relay_powers: Transmit power of every T-UAV.
        :param orderings: Orderings, encoded as keys if the layout has some.
        :return: Vector.
        """
        evaluator = self.evaluator
        bounds = evaluator.scenario.bounds
        channel = evaluator.scenario.channel
        x = np.zeros(self.size)

        genes = np.empty((evaluator.num_candidates, 3))
        genes[:, 0] = (hover[:, 2] - bounds.tuav_z_min) / (
            bounds.tuav_z_max - bounds.tuav_z_min
        )
        offsets = hover[:, :2] - evaluator.candidate_points
        genes[:, 1:] = (offsets / self.offset_radius + 1) / 2
        x[: self.gu_offset] = genes.reshape(-1)

        x[self.gu_offset : self.relay_offset] = (
            np.asarray(gu_powers) - channel.p_u_min
        ) / (channel.p_u_max - channel.p_u_min)
        x[self.relay_offset : self.key_offset] = (
            np.asarray(relay_powers) - channel.p_m_min
        ) / (channel.p_m_max - channel.p_m_min)

        if self.with_keys and orderings is not None:
            for index, order in zip(evaluator.candidate_index, orderings):
                for rank, local in enumerate(order):
                    x[self.key_offset + index[local]] = (rank + 0.5) / len(
                        order,
                    )

        return np.clip(x, 0.0, 1.0)

    def solution(
        self,
        x: npt.NDArray[np.float64],
        orderings: Sequence[Sequence[int]] | None = None,
        /,
    ) -> Solution:
        """Decode a vector into a solution.

        :param x: Vector.
        :param orderings: Orderings, required if the layout has no keys.
        :return: Solution.
        """
        return self.evaluator.from_arrays(*self.decode(x, orderings))

    def evaluate(
        self,
        x: npt.NDArray[np.float64],
        orderings: Sequence[Sequence[int]] | None = None,
        /,
    ) -> tuple[npt.NDArray[np.float64], float]:
        """Evaluate the mission encoded by a vector.

        :param x: Vector.
        :param orderings: Orderings, required if the layout has no keys.
        :return: Objectives and total normalised violation.
        """
        return self.evaluator.evaluate_arrays(*self.decode(x, orderings))

    def evaluate_many(
        self,
        xs: npt.NDArray[np.float64],
        orderings: Sequence[Sequence[int]] | None = None,
        /,
        *,
        executor: Executor | None = None,
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Evaluate the missions encoded by several vectors.

        Results are in the order of the vectors, whether they are computed
        sequentially or by the executor.

        :param xs: Vectors, of shape ``(n, size)``.
        :param orderings: Orderings shared by every vector, required if the
            layout has no keys.
        :param executor: Executor to run evaluations with, sequentially if
            None.
        :return: Objectives, of shape ``(n, 3)``, and violations, of shape
            ``(n,)``.
        """
        if executor is None:
            results = [self.evaluate(x, orderings) for x in xs]
        else:
            results = list(
                executor.map(lambda x: self.evaluate(x, orderings), xs),
            )

        objectives = np.array([r[0] for r in results]).reshape(-1, 3)
        violations = np.array([r[1] for r in results], dtype=np.float64)
        return objectives, violations
