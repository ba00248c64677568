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
"""Evaluation of missions into objectives and constraint violations.

A mission is described by a :py:class:`Solution`, which holds everything
left to decide once the swarms have been pre-deployed: the order in which
every T-UAV visits its hovering candidates, the actual hovering positions,
and the transmit powers of the ground users and T-UAVs.

Missions are evaluated against three objectives, all minimised:

* TEU, the total energy consumed by the UAVs, in J;
* AEG, the average energy consumed by the ground users, in J;
* ADG, the average transmission delay of the ground users, in seconds.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from concurrent.futures import Executor
import math
from threading import Lock
from typing import Annotated, Any, NamedTuple

from annotated_types import Ge
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from .channel import a2a_rate, g2a_rate
from .energy import EnergyBreakdown, flight_speed, power_profile
from .predeploy import ConnectionPlan, Deployment
from .scenario import Point3, Scenario, VerticalPowerMode


__all__ = [
    "ConnectionPlan",
    "ConstraintViolation",
    "FeasibilityReport",
    "MissionBreakdown",
    "MissionEvaluator",
    "ObjectiveVector",
    "Solution",
    "breakdown",
    "evaluate",
    "feasibility",
]


class Solution(BaseModel):
    """Decisions describing a mission over a deployment."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    orderings: tuple[tuple[int, ...], ...]
    """Visiting order of the hovering candidates of every T-UAV."""

    hover_points: tuple[tuple[Point3, ...], ...]
    """Hovering position of every T-UAV at each of its candidates.

    Positions are indexed by candidate, not by visiting order.
    """

    gu_powers: tuple[float, ...]
    """Transmit power of every ground user, in W."""

    relay_powers: tuple[float, ...]
    """Transmit power of every T-UAV, in W."""


class ObjectiveVector(BaseModel):
    """Objectives of a mission, all to be minimised.

    An infinite value marks a mission with a link that cannot transmit.
    """

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )
    """Model configuration."""

    teu: Annotated[float, Ge(0)]
    """Total energy consumed by the UAVs, in J."""

    aeg: Annotated[float, Ge(0)]
    """Average energy consumed by the ground users, in J."""

    adg: Annotated[float, Ge(0)]
    """Average transmission delay of the ground users, in seconds."""

    @classmethod
    def from_array(cls, value: npt.ArrayLike, /) -> ObjectiveVector:
        """Build an objective vector out of an array.

        :param value: Array of the three objectives.
        :return: Objective vector.
        """
        teu, aeg, adg = (float(v) for v in np.asarray(value))
        return cls(teu=teu, aeg=aeg, adg=adg)

    @property
    def is_finite(self, /) -> bool:
        """Whether every objective is finite."""
        return all(math.isfinite(v) for v in (self.teu, self.aeg, self.adg))

    def as_array(self, /) -> npt.NDArray[np.float64]:
        """Get the objectives as an array.

        :return: Array of shape ``(3,)``.
        """
        return np.array([self.teu, self.aeg, self.adg], dtype=np.float64)


class ConstraintViolation(BaseModel):
    """Excess over a single constraint."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    constraint: str
    """Name of the constraint, e.g. ``delay`` or ``g2a_rate``."""

    subject: str
    """What violates the constraint, e.g. ``gu 3``."""

    excess: Annotated[float, Ge(0)]
    """Amount by which the constraint is exceeded, in its own unit."""

    scale: float
    """Scale the excess is normalised with."""

    @property
    def normalized(self, /) -> float:
        """Excess divided by the scale."""
        return self.excess / self.scale


class FeasibilityReport(BaseModel):
    """Constraint violations of a mission."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    violation: Annotated[float, Ge(0)]
    """Sum of the normalised excesses."""

    details: tuple[ConstraintViolation, ...] = ()
    """Every violated constraint."""

    @property
    def feasible(self, /) -> bool:
        """Whether the mission satisfies every constraint."""
        return self.violation == 0


class MissionBreakdown(BaseModel):
    """Detailed quantities of an evaluated mission."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    g2a_delays: tuple[float, ...]
    """Upload delay of every ground user, in seconds."""

    a2a_delays: tuple[float, ...]
    """Relay delay of the data of every ground user, in seconds."""

    gu_energies: tuple[float, ...]
    """Energy consumed by every ground user, in J."""

    hover_durations: tuple[tuple[float, ...], ...]
    """Hovering duration of every T-UAV at each of its candidates."""

    tuav_energies: tuple[EnergyBreakdown, ...]
    """Energy consumed by every T-UAV."""

    tuav_mission_times: tuple[float, ...]
    """Mission time of every T-UAV, in seconds."""

    swarm_times: tuple[float, ...]
    """Hovering time of every H-UAV, in seconds."""

    swarm_energies: tuple[float, ...]
    """Energy consumed by every H-UAV, in J."""

    objectives: ObjectiveVector
    """Objectives of the mission."""


class _State(NamedTuple):
    """Intermediate quantities of an evaluation."""

    g2a_rates: npt.NDArray[np.float64]
    a2a_rates: npt.NDArray[np.float64]
    g2a_delays: npt.NDArray[np.float64]
    a2a_delays: npt.NDArray[np.float64]
    gu_energies: npt.NDArray[np.float64]
    hover_durations: npt.NDArray[np.float64]
    relay: npt.NDArray[np.float64]
    hover: npt.NDArray[np.float64]
    flight: npt.NDArray[np.float64]
    tuav_times: npt.NDArray[np.float64]
    swarm_times: npt.NDArray[np.float64]
    swarm_energies: npt.NDArray[np.float64]
    objectives: npt.NDArray[np.float64]


def _delays(
    q_bits: npt.NDArray[np.float64],
    rates: npt.NDArray[np.float64],
    /,
) -> npt.NDArray[np.float64]:
    """Get delays, infinite where the rate is not positive."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(rates > 0, q_bits / np.maximum(rates, 1e-300), np.inf)


class MissionEvaluator:
    """Evaluator of missions over a pre-deployed scenario.

    The evaluator works on arrays, hovering candidates of all T-UAVs being
    numbered in a single flat sequence; see :py:attr:`candidate_index`.
    It is safe to use from several threads, and counts the evaluations it
    runs.

    :param scenario: Scenario.
    :param deployment: Deployment over the scenario.
    :raises ValueError: The deployment does not match the scenario.
    """

    __slots__ = (
        "_count",
        "_lock",
        "candidate_index",
        "candidate_members",
        "candidate_points",
        "candidate_tuav",
        "deployment",
        "gu_candidate",
        "gu_positions",
        "gu_tuav",
        "max_delays",
        "data_sizes",
        "p_hover",
        "p_fly",
        "p_vertical",
        "scenario",
        "sites",
        "speed",
        "tuav_sites",
    )

    scenario: Scenario
    """Scenario of the missions."""

    deployment: Deployment
    """Deployment of the missions."""

    candidate_index: tuple[tuple[int, ...], ...]
    """Flat index of every candidate of every T-UAV."""

    candidate_tuav: npt.NDArray[np.int64]
    """T-UAV of every flat candidate."""

    candidate_points: npt.NDArray[np.float64]
    """Fermat point of every flat candidate, of shape ``(K, 2)``."""

    candidate_members: tuple[npt.NDArray[np.int64], ...]
    """Ground users of every flat candidate."""

    gu_candidate: npt.NDArray[np.int64]
    """Flat candidate of every ground user."""

    gu_tuav: npt.NDArray[np.int64]
    """T-UAV of every ground user."""

    def __init__(self, scenario: Scenario, deployment: Deployment, /) -> None:
        if len(deployment.connections.assignment) != len(scenario.gus):
            raise ValueError(
                f"Deployment connects {len(deployment.connections.assignment)}"
                + f" ground user(s), scenario has {len(scenario.gus)}.",
            )

        self.scenario = scenario
        self.deployment = deployment
        self._lock = Lock()
        self._count = 0

        index: list[tuple[int, ...]] = []
        tuavs: list[int] = []
        points: list[npt.NDArray[np.float64]] = []
        members: list[npt.NDArray[np.int64]] = []
        for tuav, groups in enumerate(deployment.fermat_candidates):
            index.append(tuple(range(len(tuavs), len(tuavs) + len(groups))))
            for group in groups:
                tuavs.append(tuav)
                points.append(group.point.as_array())
                members.append(np.array(group.members, dtype=np.int64))

        self.candidate_index = tuple(index)
        self.candidate_tuav = np.array(tuavs, dtype=np.int64)
        self.candidate_points = np.array(points).reshape(-1, 2)
        self.candidate_members = tuple(members)

        assignment = deployment.connections.assignment
        self.gu_candidate = np.array(
            [index[slot.tuav][slot.hover] for slot in assignment],
            dtype=np.int64,
        )
        self.gu_tuav = np.array([s.tuav for s in assignment], dtype=np.int64)
        self.gu_positions = scenario.gu_positions
        self.data_sizes = np.array([gu.data_size for gu in scenario.gus])
        self.max_delays = np.array([gu.max_delay for gu in scenario.gus])

        self.sites = np.array([s.as_array() for s in deployment.swarm_sites])
        self.tuav_sites = self.sites[np.array(deployment.tuav_swarms)]

        profile = power_profile(scenario.energy)
        self.p_hover = profile.p_hover
        self.p_fly = profile.p_fly_horizontal
        self.p_vertical = profile.p_vertical
        self.speed = flight_speed(scenario.energy)

    @property
    def num_candidates(self, /) -> int:
        """Total number of hovering candidates."""
        return len(self.candidate_tuav)

    @property
    def num_gus(self, /) -> int:
        """Number of ground users."""
        return len(self.gu_candidate)

    @property
    def num_tuavs(self, /) -> int:
        """Number of T-UAVs."""
        return len(self.candidate_index)

    @property
    def evaluations(self, /) -> int:
        """Number of evaluations run so far."""
        with self._lock:
            return self._count

    def _tick(self, count: int = 1, /) -> None:
        with self._lock:
            self._count += count

    def check_structure(self, solution: Solution, /) -> None:
        """Check that a solution has the shape of the deployment.

        :param solution: Solution to check.
        :raises ValueError: The solution does not match the deployment.
        """
        if len(solution.gu_powers) != self.num_gus:
            raise ValueError("Expected one power per ground user.")
        if len(solution.relay_powers) != self.num_tuavs:
            raise ValueError("Expected one relay power per T-UAV.")
        if len(solution.orderings) != self.num_tuavs:
            raise ValueError("Expected one ordering per T-UAV.")
        if len(solution.hover_points) != self.num_tuavs:
            raise ValueError("Expected hovering points for every T-UAV.")

        for tuav, index in enumerate(self.candidate_index):
            if sorted(solution.orderings[tuav]) != list(range(len(index))):
                raise ValueError(
                    f"Ordering of T-UAV {tuav} is not a permutation.",
                )
            if len(solution.hover_points[tuav]) != len(index):
                raise ValueError(
                    f"Expected {len(index)} hovering point(s) for T-UAV "
                    + f"{tuav}.",
                )

    def to_arrays(
        self,
        solution: Solution,
        /,
    ) -> tuple[
        npt.NDArray[np.float64],
        list[list[int]],
        npt.NDArray[np.float64],
        npt.NDArray[np.float64],
    ]:
        """Get the arrays describing a solution.

        :param solution: Solution.
        :return: Hovering positions of the flat candidates, orderings in
            local candidate indexes, ground user and relay powers.
        """
        self.check_structure(solution)
        hover = np.array(
            [p.as_array() for points in solution.hover_points for p in points],
        ).reshape(-1, 3)
        return (
            hover,
            [list(o) for o in solution.orderings],
            np.array(solution.gu_powers, dtype=np.float64),
            np.array(solution.relay_powers, dtype=np.float64),
        )

    def from_arrays(
        self,
        hover: npt.NDArray[np.float64],
        orderings: Sequence[Sequence[int]],
        gu_powers: npt.NDArray[np.float64],
        relay_powers: npt.NDArray[np.float64],
        /,
    ) -> Solution:
        """Build a solution out of arrays.

        :param hover: Hovering positions of the flat candidates.
        :param orderings: Orderings, in local candidate indexes.
        :param gu_powers: Transmit power of every ground user.
        :param relay_powers: Transmit power of every T-UAV.
        :return: Solution.
        """
        return Solution(
            orderings=tuple(tuple(int(n) for n in o) for o in orderings),
            hover_points=tuple(
                tuple(Point3.from_array(hover[k]) for k in index)
                for index in self.candidate_index
            ),
            gu_powers=tuple(float(p) for p in gu_powers),
            relay_powers=tuple(float(p) for p in relay_powers),
        )

    def default_solution(
        self,
        /,
        *,
        altitude: float | None = None,
        gu_power: float | None = None,
        relay_power: float | None = None,
    ) -> Solution:
        """Get a mission hovering right above the Fermat points.

        Candidates are visited in index order, at the lowest altitude and
        with the highest powers unless specified otherwise.

        :param altitude: Hovering altitude, in meters.
        :param gu_power: Transmit power of every ground user, in W.
        :param relay_power: Transmit power of every T-UAV, in W.
        :return: Solution.
        """
        channel = self.scenario.channel
        z = self.scenario.bounds.tuav_z_min if altitude is None else altitude
        hover = np.column_stack(
            [self.candidate_points, np.full(self.num_candidates, z)],
        )
        return self.from_arrays(
            hover,
            [range(len(index)) for index in self.candidate_index],
            np.full(
                self.num_gus,
                channel.p_u_max if gu_power is None else gu_power,
            ),
            np.full(
                self.num_tuavs,
                channel.p_m_max if relay_power is None else relay_power,
            ),
        )

    def _leg_energy(
        self,
        start: npt.NDArray[np.float64],
        end: npt.NDArray[np.float64],
        /,
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Get the durations and energies of legs.

        :param start: Start positions, of shape ``(n, 3)``.
        :param end: End positions, of shape ``(n, 3)``.
        :return: Durations and energies of the legs.
        """
        lengths = np.linalg.norm(end - start, axis=-1)
        durations = lengths / self.speed
        if (
            self.scenario.energy.vertical_power_mode
            == VerticalPowerMode.SCALED
        ):
            with np.errstate(divide="ignore", invalid="ignore"):
                share = np.where(
                    lengths > 0,
                    np.abs(end[..., 2] - start[..., 2]) / lengths,
                    0.0,
                )
            power = self.p_fly + self.p_vertical * share
        else:
            power = np.full_like(lengths, self.p_fly + self.p_vertical)

        return durations, power * durations

    def _links(
        self,
        hover: npt.NDArray[np.float64],
        gu_powers: npt.NDArray[np.float64],
        relay_powers: npt.NDArray[np.float64],
        /,
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Get the G2A and A2A rates of every ground user."""
        params = self.scenario.channel
        uav = hover[self.gu_candidate]
        g2a = np.asarray(
            g2a_rate(self.gu_positions, uav, gu_powers, params),
            dtype=np.float64,
        ).reshape(-1)
        a2a = np.asarray(
            a2a_rate(
                relay_powers[self.gu_tuav],
                params,
                dist=np.linalg.norm(
                    uav - self.tuav_sites[self.gu_tuav],
                    axis=1,
                ),
            ),
            dtype=np.float64,
        ).reshape(-1)
        return g2a, a2a

    def _state(
        self,
        hover: npt.NDArray[np.float64],
        orderings: Sequence[Sequence[int]],
        gu_powers: npt.NDArray[np.float64],
        relay_powers: npt.NDArray[np.float64],
        /,
    ) -> _State:
        """Evaluate a mission described by arrays."""
        g2a, a2a = self._links(hover, gu_powers, relay_powers)
        t_g2a = _delays(self.data_sizes, g2a)
        t_a2a = _delays(self.data_sizes, a2a)
        total_delays = t_g2a + t_a2a
        gu_energies = np.where(np.isfinite(t_g2a), gu_powers * t_g2a, np.inf)

        hover_durations = np.zeros(self.num_candidates)
        np.maximum.at(hover_durations, self.gu_candidate, total_delays)

        relay = np.zeros(self.num_tuavs)
        np.add.at(relay, self.gu_tuav, t_a2a)
        relay = relay_powers * relay

        hover_sums = np.zeros(self.num_tuavs)
        np.add.at(hover_sums, self.candidate_tuav, hover_durations)

        flight = np.zeros(self.num_tuavs)
        flight_times = np.zeros(self.num_tuavs)
        for tuav, index in enumerate(self.candidate_index):
            if not index:
                continue

            route = np.vstack(
                [
                    self.tuav_sites[tuav],
                    hover[[index[n] for n in orderings[tuav]]],
                ],
            )
            durations, energies = self._leg_energy(route[:-1], route[1:])
            flight_times[tuav] = durations.sum()
            flight[tuav] = energies.sum()

        hover_energy = self.p_hover * hover_sums
        tuav_times = hover_sums + flight_times
        swarm_times = np.zeros(len(self.sites))
        np.maximum.at(
            swarm_times,
            np.array(self.deployment.tuav_swarms, dtype=np.int64),
            tuav_times,
        )
        swarm_energies = self.p_hover * swarm_times

        totals = relay + hover_energy + flight
        teu = sum(swarm_energies.tolist()) + sum(totals.tolist())
        objectives = np.array(
            [teu, float(gu_energies.mean()), float(total_delays.mean())],
        )
        return _State(
            g2a_rates=g2a,
            a2a_rates=a2a,
            g2a_delays=t_g2a,
            a2a_delays=t_a2a,
            gu_energies=gu_energies,
            hover_durations=hover_durations,
            relay=relay,
            hover=hover_energy,
            flight=flight,
            tuav_times=tuav_times,
            swarm_times=swarm_times,
            swarm_energies=swarm_energies,
            objectives=objectives,
        )

    def _violations(
        self,
        state: _State,
        hover: npt.NDArray[np.float64],
        gu_powers: npt.NDArray[np.float64],
        relay_powers: npt.NDArray[np.float64],
        /,
    ) -> Iterable[tuple[str, npt.NDArray[np.float64], Any, str]]:
        """Get the excesses over every constraint.

        :return: Constraint name, excess of every subject, scale of every
            subject or of all of them, and subject label prefix.
        """
        channel = self.scenario.channel
        bounds = self.scenario.bounds
        delays = state.g2a_delays + state.a2a_delays
        yield (
            "delay",
            np.maximum(delays - self.max_delays, 0.0),
            self.max_delays,
            "gu",
        )
        yield (
            "g2a_rate",
            np.maximum(channel.r_min_g2a - state.g2a_rates, 0.0),
            channel.r_min_g2a,
            "gu",
        )
        yield (
            "a2a_rate",
            np.maximum(channel.r_min_a2a - state.a2a_rates, 0.0),
            channel.r_min_a2a,
            "gu",
        )
        yield (
            "gu_power",
            np.maximum(channel.p_u_min - gu_powers, 0.0)
            + np.maximum(gu_powers - channel.p_u_max, 0.0),
            channel.p_u_max,
            "gu",
        )
        yield (
            "relay_power",
            np.maximum(channel.p_m_min - relay_powers, 0.0)
            + np.maximum(relay_powers - channel.p_m_max, 0.0),
            channel.p_m_max,
            "tuav",
        )
        yield (
            "hover_altitude",
            np.maximum(bounds.tuav_z_min - hover[:, 2], 0.0)
            + np.maximum(hover[:, 2] - bounds.tuav_z_max, 0.0),
            bounds.tuav_z_max - bounds.tuav_z_min,
            "candidate",
        )
        yield (
            "hover_area",
            np.maximum(bounds.x_min - hover[:, 0], 0.0)
            + np.maximum(hover[:, 0] - bounds.x_max, 0.0)
            + np.maximum(bounds.y_min - hover[:, 1], 0.0)
            + np.maximum(hover[:, 1] - bounds.y_max, 0.0),
            bounds.diagonal,
            "candidate",
        )

        sizes = np.bincount(self.gu_candidate, minlength=self.num_candidates)
        u_max = max(self.scenario.u_max, 1)
        yield (
            "capacity",
            np.maximum(sizes - self.scenario.u_max, 0).astype(np.float64),
            float(u_max),
            "candidate",
        )

        allocation = np.array(self.deployment.allocation, dtype=np.float64)
        yield (
            "swarm_size",
            np.maximum(allocation - self.scenario.m_max, 0.0),
            1.0,
            "swarm",
        )
        yield (
            "tuav_count",
            np.array([abs(allocation.sum() - self.scenario.num_tuavs)]),
            1.0,
            "swarm",
        )

    def _violation(
        self,
        state: _State,
        hover: npt.NDArray[np.float64],
        gu_powers: npt.NDArray[np.float64],
        relay_powers: npt.NDArray[np.float64],
        /,
    ) -> float:
        return float(
            sum(
                float((excess / scale).sum())
                for _, excess, scale, _ in self._violations(
                    state,
                    hover,
                    gu_powers,
                    relay_powers,
                )
            ),
        )

    def evaluate_arrays(
        self,
        hover: npt.NDArray[np.float64],
        orderings: Sequence[Sequence[int]],
        gu_powers: npt.NDArray[np.float64],
        relay_powers: npt.NDArray[np.float64],
        /,
        *,
        count: bool = True,
    ) -> tuple[npt.NDArray[np.float64], float]:
        """Evaluate a mission described by arrays.

        This counts as one evaluation, unless ``count`` is false.

        :param hover: Hovering positions of the flat candidates.
        :param orderings: Orderings, in local candidate indexes.
        :param gu_powers: Transmit power of every ground user.
        :param relay_powers: Transmit power of every T-UAV.
        :param count: Whether to count the evaluation.
        :return: Objectives and total normalised violation.
        """
        if count:
            self._tick()

        state = self._state(hover, orderings, gu_powers, relay_powers)
        violation = self._violation(state, hover, gu_powers, relay_powers)
        return state.objectives, violation

    def evaluate(self, solution: Solution, /) -> ObjectiveVector:
        """Evaluate the objectives of a solution.

        :param solution: Solution to evaluate.
        :return: Objective vector.
        """
        objectives, _ = self.evaluate_arrays(*self.to_arrays(solution))
        return ObjectiveVector.from_array(objectives)

    def evaluate_many(
        self,
        solutions: Sequence[Solution],
        /,
        *,
        executor: Executor | None = None,
    ) -> list[ObjectiveVector]:
        """Evaluate several solutions, possibly concurrently.

        :param solutions: Solutions to evaluate.
        :param executor: Executor to run evaluations with, sequentially if
            None.
        :return: Objective vectors, in the order of the solutions.
        """
        if executor is None:
            return [self.evaluate(s) for s in solutions]

        return list(executor.map(self.evaluate, solutions))

    def feasibility(self, solution: Solution, /) -> FeasibilityReport:
        """Get the constraint violations of a solution.

        :param solution: Solution to check.
        :return: Feasibility report.
        """
        hover, orderings, gu_powers, relay_powers = self.to_arrays(solution)
        state = self._state(hover, orderings, gu_powers, relay_powers)
        details: list[ConstraintViolation] = []
        total = 0.0
        for name, excess, scale, prefix in self._violations(
            state,
            hover,
            gu_powers,
            relay_powers,
        ):
            scales = np.broadcast_to(scale, excess.shape)
            total += float((excess / scales).sum())
            for subject in np.flatnonzero(excess > 0):
                details.append(
                    ConstraintViolation(
                        constraint=name,
                        subject=f"{prefix} {subject}",
                        excess=float(excess[subject]),
                        scale=float(scales[subject]),
                    ),
                )

        return FeasibilityReport(violation=total, details=tuple(details))

    def breakdown(self, solution: Solution, /) -> MissionBreakdown:
        """Get the detailed quantities of a mission.

        :param solution: Solution to detail.
        :return: Mission breakdown.
        """
        hover, orderings, gu_powers, relay_powers = self.to_arrays(solution)
        state = self._state(hover, orderings, gu_powers, relay_powers)
        return MissionBreakdown(
            g2a_delays=tuple(state.g2a_delays.tolist()),
            a2a_delays=tuple(state.a2a_delays.tolist()),
            gu_energies=tuple(state.gu_energies.tolist()),
            hover_durations=tuple(
                tuple(float(state.hover_durations[k]) for k in index)
                for index in self.candidate_index
            ),
            tuav_energies=tuple(
                EnergyBreakdown(
                    relay=float(state.relay[m]),
                    hover=float(state.hover[m]),
                    flight=float(state.flight[m]),
                )
                for m in range(self.num_tuavs)
            ),
            tuav_mission_times=tuple(state.tuav_times.tolist()),
            swarm_times=tuple(state.swarm_times.tolist()),
            swarm_energies=tuple(state.swarm_energies.tolist()),
            objectives=ObjectiveVector.from_array(state.objectives),
        )

    def marginals(
        self,
        tuav: int,
        position: npt.NDArray[np.float64],
        candidates: Sequence[int],
        hover: npt.NDArray[np.float64],
        gu_powers: npt.NDArray[np.float64],
        relay_power: float,
        /,
    ) -> npt.NDArray[np.float64]:
        """Predict the change of every objective when visiting candidates.

        The change of TEU accounts for the leg from the current position,
        the hovering at the candidate and the relay of its ground users.
        Changes of AEG and ADG are the contributions of the ground users of
        the candidate to the averages.

        This does not count as an evaluation.

        :param tuav: Index of the T-UAV.
        :param position: Current position of the T-UAV.
        :param candidates: Local indexes of the candidates.
        :param hover: Hovering positions of the flat candidates.
        :param gu_powers: Transmit power of every ground user.
        :param relay_power: Transmit power of the T-UAV.
        :return: Changes, of shape ``(len(candidates), 3)``.
        """
        flat = [self.candidate_index[tuav][n] for n in candidates]
        relay_powers = np.full(self.num_tuavs, relay_power)
        g2a, a2a = self._links(hover, gu_powers, relay_powers)
        t_g2a = _delays(self.data_sizes, g2a)
        t_a2a = _delays(self.data_sizes, a2a)

        _, leg_energies = self._leg_energy(
            np.broadcast_to(position, (len(flat), 3)),
            hover[flat],
        )
        result = np.empty((len(flat), 3))
        for row, k in enumerate(flat):
            members = self.candidate_members[k]
            delays = t_g2a[members] + t_a2a[members]
            result[row, 0] = (
                leg_energies[row]
                + self.p_hover * delays.max()
                + relay_power * t_a2a[members].sum()
            )
            result[row, 1] = (gu_powers[members] * t_g2a[members]).sum()
            result[row, 2] = delays.sum()

        result[:, 1:] /= self.num_gus
        return result


def evaluate(
    scenario: Scenario,
    deployment: Deployment,
    solution: Solution,
    /,
) -> ObjectiveVector:
    """Evaluate the objectives of a mission.

    .. doctest::

        >>> from swarmcollect.predeploy import predeploy
        >>> from swarmcollect.scenario import generate_scenario
        >>> scenario = generate_scenario(None, 6, 1, 1, 0)
        >>> deployment = predeploy(scenario)
        >>> evaluator = MissionEvaluator(scenario, deployment)
        >>> solution = evaluator.default_solution()
        >>> evaluate(scenario, deployment, solution).is_finite
        True

    :param scenario: Scenario of the mission.
    :param deployment: Deployment of the swarms.
    :param solution: Decisions of the mission.
    :return: Objective vector, with infinite values if a link cannot
        transmit.
    """
    return MissionEvaluator(scenario, deployment).evaluate(solution)


def feasibility(
    scenario: Scenario,
    deployment: Deployment,
    solution: Solution,
    /,
) -> FeasibilityReport:
    """Get the constraint violations of a mission.

    :param scenario: Scenario of the mission.
    :param deployment: Deployment of the swarms.
    :param solution: Decisions of the mission.
    :return: Feasibility report.
    """
    return MissionEvaluator(scenario, deployment).feasibility(solution)


def breakdown(
    scenario: Scenario,
    deployment: Deployment,
    solution: Solution,
    /,
) -> MissionBreakdown:
    """Get the detailed quantities of a mission.

    :param scenario: Scenario of the mission.
    :param deployment: Deployment of the swarms.
    :param solution: Decisions of the mission.
    :return: Mission breakdown.
    """
    return MissionEvaluator(scenario, deployment).breakdown(solution)
