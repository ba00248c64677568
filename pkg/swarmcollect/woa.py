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
"""Whale optimisation with greedy hover sequencing.

The engine builds missions one hovering position at a time. Every T-UAV
in turn chooses the next candidate it visits with a greedy rule over the
predicted change of the objectives; the decisions attached to this
candidate are then optimised by a population of whale agents, keeping the
decisions of the previous steps. Each agent carries a whole mission, so
that the final population directly holds mission-level trade-offs.
"""

from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from typing import Annotated

from annotated_types import Ge, Gt
from loguru import logger
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from .encoding import MissionLayout, nearest_neighbour_order
from .evaluator import MissionEvaluator
from .moo import (
    NondominatedSet,
    ParetoArchive,
    StepSnapshot,
    build_archive,
    compromise_index,
    environmental_selection,
    greedy_next_hover,
    rank_and_crowding,
    select_leader,
    update_a,
    woa_update,
)
from .predeploy import Deployment
from .scenario import Scenario
from .utils import spawn_rng


__all__ = ["WoaParams", "ins_woa"]

ENGINE_NAME = "ins-woa"
"""Name of the engine in archives and experiment records."""


class WoaParams(BaseModel):
    """Parameters of the whale optimisation engine."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    population: Annotated[int, Ge(4)] = 30
    """Number of whale agents."""

    iterations: Annotated[int, Ge(1)] = 50
    """Number of iterations per hovering step."""

    spiral_b: float = 1.0
    """Constant defining the shape of the logarithmic spiral."""

    seed: int = 0
    """Seed of the run."""

    offset_radius: Annotated[float, Gt(0)] = 50.0
    """Largest horizontal offset to the Fermat points, in meters."""

    workers: Annotated[int, Ge(1)] = 1
    """Number of threads evaluating missions."""


def _best_values(
    objectives: npt.NDArray[np.float64],
    violations: npt.NDArray[np.float64],
    /,
) -> npt.NDArray[np.float64]:
    """Get the best value of every objective among usable members."""
    usable = (violations == 0) & np.all(np.isfinite(objectives), axis=1)
    if not usable.any():
        usable = np.all(np.isfinite(objectives), axis=1)
    if not usable.any():
        return np.ones(objectives.shape[1])

    return objectives[usable].min(axis=0)


def _compromise_agent(
    objectives: npt.NDArray[np.float64],
    violations: npt.NDArray[np.float64],
    /,
) -> int:
    """Get the agent whose decisions drive the greedy rule."""
    usable = np.flatnonzero(
        (violations == 0) & np.all(np.isfinite(objectives), axis=1),
    )
    if not len(usable):
        return int(np.argmin(violations))

    return int(usable[compromise_index(objectives[usable])])


class _Run:
    """State of a whale optimisation run."""

    __slots__ = (
        "agents",
        "archive",
        "evaluator",
        "executor",
        "layout",
        "objectives",
        "params",
        "violations",
        "visited",
    )

    def __init__(
        self,
        evaluator: MissionEvaluator,
        params: WoaParams,
        executor: Executor | None,
        /,
    ) -> None:
        self.evaluator = evaluator
        self.params = params
        self.executor = executor
        self.layout = MissionLayout(
            evaluator,
            offset_radius=params.offset_radius,
        )
        self.visited: list[list[int]] = [[] for _ in evaluator.candidate_index]
        self.archive = NondominatedSet()
        self.agents = np.array(
            [
                spawn_rng(params.seed, j).random(self.layout.size)
                for j in range(params.population)
            ],
        ).reshape(params.population, self.layout.size)
        self.objectives, self.violations = self.evaluate(self.agents)

    def orderings(self, /) -> list[list[int]]:
        """Get the orderings completing the visited candidates."""
        evaluator = self.evaluator
        return [
            nearest_neighbour_order(
                evaluator.tuav_sites[tuav, :2],
                evaluator.candidate_points[list(index)],
                self.visited[tuav],
            )
            for tuav, index in enumerate(evaluator.candidate_index)
        ]

    def evaluate(
        self,
        xs: npt.NDArray[np.float64],
        /,
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Evaluate vectors, and keep the good ones in the archive."""
        orderings = self.orderings()
        objectives, violations = self.layout.evaluate_many(
            xs,
            orderings,
            executor=self.executor,
        )
        frozen = tuple(tuple(o) for o in orderings)
        self.archive.add(
            objectives,
            violations,
            [(x.copy(), frozen) for x in xs],
        )
        return objectives, violations

    def choose(self, tuav: int, /) -> int:
        """Choose the next candidate of a T-UAV, and mark it as visited."""
        evaluator = self.evaluator
        index = evaluator.candidate_index[tuav]
        visited = self.visited[tuav]
        remaining = [n for n in range(len(index)) if n not in visited]
        if len(remaining) == 1:
            self.visited[tuav].append(remaining[0])
            return remaining[0]

        agent = _compromise_agent(self.objectives, self.violations)
        hover, _, gu_powers, relay_powers = self.layout.decode(
            self.agents[agent],
            self.orderings(),
        )
        if self.visited[tuav]:
            position = hover[index[self.visited[tuav][-1]]]
        else:
            position = evaluator.tuav_sites[tuav]

        deltas = evaluator.marginals(
            tuav,
            position,
            remaining,
            hover,
            gu_powers,
            float(relay_powers[tuav]),
        )
        best = _best_values(self.objectives, self.violations)
        choice = remaining[greedy_next_hover(deltas, best)]
        self.visited[tuav].append(choice)
        return choice

    def optimise(self, candidate: int, step: int, /) -> None:
        """Optimise the decisions attached to a candidate."""
        params = self.params
        genes = self.layout.step_indexes(candidate)
        rngs = [
            spawn_rng(params.seed, j, step + 1)
            for j in range(params.population)
        ]

        for i in range(params.iterations):
            a = update_a(i, params.iterations)
            ranks, crowding = rank_and_crowding(
                self.objectives,
                self.violations,
            )
            leader = self.agents[select_leader(ranks, crowding)]

            offspring = self.agents.copy()
            for j, rng in enumerate(rngs):
                other = self.agents[int(rng.integers(params.population))]
                offspring[j, genes] = woa_update(
                    self.agents[j, genes],
                    leader[genes],
                    other[genes],
                    a,
                    rng,
                    spiral_b=params.spiral_b,
                )

            objectives, violations = self.evaluate(offspring)
            pool = np.vstack([self.agents, offspring])
            pool_objectives = np.vstack([self.objectives, objectives])
            pool_violations = np.concatenate([self.violations, violations])
            chosen = environmental_selection(
                pool_objectives,
                pool_violations,
                params.population,
            )
            self.agents = pool[chosen]
            self.objectives = pool_objectives[chosen]
            self.violations = pool_violations[chosen]


def ins_woa(
    scenario: Scenario,
    deployment: Deployment,
    params: WoaParams | None = None,
    /,
    *,
    on_step: Callable[[StepSnapshot], None] | None = None,
) -> ParetoArchive:
    """Optimise missions over a deployment with the whale engine.

    Steps go round-robin over the T-UAVs by index, until every candidate of
    every T-UAV has been visited. The number of evaluations of a run is
    given by :py:func:`swarmcollect.moo.evaluation_budget`.

    :param scenario: Scenario.
    :param deployment: Deployment over the scenario.
    :param params: Parameters of the engine.
    :param on_step: Function to call with a snapshot after every step.
    :return: Archive of the run; it may only contain infeasible members,
        in which case a warning is logged.
    """
    if params is None:
        params = WoaParams()

    evaluator = MissionEvaluator(scenario, deployment)
    executor_context = (
        ThreadPoolExecutor(max_workers=params.workers)
        if params.workers > 1
        else nullcontext(None)
    )

    with executor_context as executor:
        run = _Run(evaluator, params, executor)
        step = 0
        while True:
            pending = [
                tuav
                for tuav, index in enumerate(evaluator.candidate_index)
                if len(run.visited[tuav]) < len(index)
            ]
            if not pending:
                break

            for tuav in pending:
                local = run.choose(tuav)
                run.optimise(evaluator.candidate_index[tuav][local], step)
                logger.debug(
                    "Step {}: T-UAV {} visits candidate {}, {} mission(s) "
                    + "archived.",
                    step,
                    tuav,
                    local,
                    len(run.archive),
                )
                if on_step is not None:
                    on_step(
                        StepSnapshot(
                            step=step,
                            tuav=tuav,
                            candidate=local,
                            evaluations=evaluator.evaluations,
                            archive_objectives=tuple(
                                (float(a), float(b), float(c))
                                for a, b, c in run.archive.objectives
                            ),
                        ),
                    )

                step += 1

    layout = run.layout
    entries = [
        (layout.solution(x, orderings), objectives, 0.0)
        for (x, orderings), objectives in zip(
            run.archive.payloads,
            run.archive.objectives,
        )
    ]
    # Agents may have been scored under an earlier provisional ordering.
    orderings = run.orderings()
    for x in run.agents:
        objectives, violation = evaluator.evaluate_arrays(
            *layout.decode(x, orderings),
            count=False,
        )
        entries.append((layout.solution(x, orderings), objectives, violation))

    archive = build_archive(
        entries,
        params.population,
        engine=ENGINE_NAME,
        evaluations=evaluator.evaluations,
    )
    if not archive.any_feasible:
        logger.warning(
            "No feasible mission found after {} evaluations.",
            archive.evaluations,
        )

    return archive
