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
"""Genetic baseline engine.

The engine evolves whole missions, visiting orders being encoded with one
random key per hovering candidate. It shares the evaluator, the decision
bounds and the archive format of the whale engine, so that both can be
compared at the same number of evaluations.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from typing import Annotated

from annotated_types import Ge, Gt, Le
from loguru import logger
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from .encoding import MissionLayout
from .evaluator import MissionEvaluator
from .moo import (
    NondominatedSet,
    ParetoArchive,
    build_archive,
    environmental_selection,
    rank_and_crowding,
)
from .predeploy import Deployment
from .scenario import Scenario
from .utils import spawn_rng


__all__ = [
    "Nsga2Params",
    "generations_for_budget",
    "nsga2",
    "polynomial_mutation",
    "sbx_crossover",
    "tournament",
]

ENGINE_NAME = "nsga2"
"""Name of the engine in archives and experiment records."""


class Nsga2Params(BaseModel):
    """Parameters of the genetic engine."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    population: Annotated[int, Ge(4)] = 30
    """Number of individuals."""

    generations: Annotated[int, Ge(0)] | None = None
    """Number of generations, derived from the budget if None."""

    crossover_prob: Annotated[float, Ge(0), Le(1)] = 0.9
    """Probability for a pair of parents to be crossed."""

    eta_c: Annotated[float, Gt(0)] = 15.0
    """Distribution index of the crossover."""

    eta_m: Annotated[float, Gt(0)] = 20.0
    """Distribution index of the mutation."""

    seed: int = 0
    """Seed of the run."""

    offset_radius: Annotated[float, Gt(0)] = 50.0
    """Largest horizontal offset to the Fermat points, in meters."""

    workers: Annotated[int, Ge(1)] = 1
    """Number of threads evaluating missions."""


def tournament(
    ranks: npt.NDArray[np.int64],
    crowding: npt.NDArray[np.float64],
    count: int,
    rng: np.random.Generator,
    /,
) -> npt.NDArray[np.int64]:
    """Select parents by binary tournaments.

    The winner of a tournament has the lower rank, then the higher
    crowding distance, then the lower index.

    :param ranks: Front rank of every individual.
    :param crowding: Crowding distance of every individual.
    :param count: Number of parents to select.
    :param rng: Random generator.
    :return: Indexes of the parents.
    """
    pairs = rng.integers(len(ranks), size=(count, 2))
    winners = np.empty(count, dtype=np.int64)
    for row, (i, j) in enumerate(pairs):
        winners[row] = min(
            (int(i), int(j)),
            key=lambda k: (ranks[k], -crowding[k], k),
        )

    return winners


def sbx_crossover(
    parents: npt.NDArray[np.float64],
    eta: float,
    prob: float,
    rng: np.random.Generator,
    /,
) -> npt.NDArray[np.float64]:
    """Cross pairs of parents with simulated binary crossover.

    The first half of the parents is paired with the second half, and every
    pair gives two children. Each gene is crossed with probability 0.5, and
    each pair is left unchanged with probability ``1 - prob``.

    :param parents: Parents in the unit hypercube, of shape ``(2n, d)``.
    :param eta: Distribution index.
    :param prob: Probability for a pair to be crossed.
    :param rng: Random generator.
    :return: Children, of shape ``(2n, d)``.
    """
    half = len(parents) // 2
    first, second = parents[:half], parents[half : 2 * half]
    mu = rng.random(first.shape)
    beta = np.where(
        mu <= 0.5,
        np.power(2 * mu, 1 / (eta + 1)),
        np.power(2 * (1 - mu), -1 / (eta + 1)),
    )
    beta = beta * np.where(rng.random(first.shape) < 0.5, -1.0, 1.0)
    beta[rng.random(first.shape) < 0.5] = 1.0
    beta[rng.random(half) > prob] = 1.0

    mean = (first + second) / 2
    spread = (first - second) / 2
    children = np.vstack([mean + beta * spread, mean - beta * spread])
    return np.clip(children, 0.0, 1.0)


def polynomial_mutation(
    x: npt.NDArray[np.float64],
    eta: float,
    prob: float,
    rng: np.random.Generator,
    /,
) -> npt.NDArray[np.float64]:
    """Mutate genes in the unit hypercube with polynomial mutation.

    :param x: Individuals, of shape ``(n, d)``.
    :param eta: Distribution index.
    :param prob: Probability for a gene to be mutated.
    :param rng: Random generator.
    :return: Mutated individuals.
    """
    y = x.copy()
    site = rng.random(y.shape) < prob
    mu = rng.random(y.shape)
    power = 1 / (eta + 1)

    low = site & (mu <= 0.5)
    y[low] += (
        np.power(
            2 * mu[low] + (1 - 2 * mu[low]) * np.power(1 - y[low], eta + 1),
            power,
        )
        - 1
    )
    high = site & (mu > 0.5)
    y[high] += 1 - np.power(
        2 * (1 - mu[high])
        + 2 * (mu[high] - 0.5) * np.power(y[high], eta + 1),
        power,
    )
    return np.clip(y, 0.0, 1.0)


def generations_for_budget(budget: int, population: int, /) -> int:
    """Get the number of generations fitting in an evaluation budget.

    The initial population costs one generation, and the number of
    evaluations never exceeds the budget.

    .. doctest::

        >>> generations_for_budget(30 * (1 + 19 * 50), 30)
        950

    :param budget: Number of evaluations.
    :param population: Number of individuals.
    :return: Number of generations after the initial one.
    """
    return max(budget // population - 1, 0)


def nsga2(
    scenario: Scenario,
    deployment: Deployment,
    params: Nsga2Params | None = None,
    /,
    *,
    budget: int | None = None,
) -> ParetoArchive:
    """Optimise missions over a deployment with the genetic engine.

    :param scenario: Scenario.
    :param deployment: Deployment over the scenario.
    :param params: Parameters of the engine.
    :param budget: Number of evaluations, used when the parameters do not
        set the number of generations.
    :return: Archive of the run; it may only contain infeasible members,
        in which case a warning is logged.
    :raises ValueError: Neither the generations nor the budget are set.
    """
    if params is None:
        params = Nsga2Params()

    if params.generations is not None:
        generations = params.generations
    elif budget is not None:
        generations = generations_for_budget(budget, params.population)
    else:
        raise ValueError("Either generations or a budget must be provided.")

    evaluator = MissionEvaluator(scenario, deployment)
    layout = MissionLayout(
        evaluator,
        offset_radius=params.offset_radius,
        with_keys=True,
    )
    archive = NondominatedSet()
    size = params.population
    mutation_prob = 1 / max(layout.size, 1)
    executor_context = (
        ThreadPoolExecutor(max_workers=params.workers)
        if params.workers > 1
        else nullcontext(None)
    )

    with executor_context as executor:

        def evaluate(
            xs: npt.NDArray[np.float64],
            /,
        ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
            objectives, violations = layout.evaluate_many(
                xs,
                executor=executor,
            )
            archive.add(objectives, violations, [x.copy() for x in xs])
            return objectives, violations

        population = layout.random(spawn_rng(params.seed, 0), size)
        objectives, violations = evaluate(population)

        for generation in range(1, generations + 1):
            rng = spawn_rng(params.seed, generation)
            ranks, crowding = rank_and_crowding(objectives, violations)
            parents = population[
                tournament(ranks, crowding, size + size % 2, rng)
            ]
            children = sbx_crossover(
                parents,
                params.eta_c,
                params.crossover_prob,
                rng,
            )
            children = polynomial_mutation(
                children,
                params.eta_m,
                mutation_prob,
                rng,
            )[:size]

            child_objectives, child_violations = evaluate(children)
            pool = np.vstack([population, children])
            pool_objectives = np.vstack([objectives, child_objectives])
            pool_violations = np.concatenate([violations, child_violations])
            chosen = environmental_selection(
                pool_objectives,
                pool_violations,
                size,
            )
            population = pool[chosen]
            objectives = pool_objectives[chosen]
            violations = pool_violations[chosen]

            if generation % 50 == 0:
                logger.debug(
                    "Generation {}/{}: {} mission(s) archived.",
                    generation,
                    generations,
                    len(archive),
                )

    entries = [
        (layout.solution(x), f, 0.0)
        for x, f in zip(archive.payloads, archive.objectives)
    ]
    entries.extend(
        (layout.solution(x), f, float(v))
        for x, f, v in zip(population, objectives, violations)
    )

    result = build_archive(
        entries,
        size,
        engine=ENGINE_NAME,
        evaluations=evaluator.evaluations,
    )
    if not result.any_feasible:
        logger.warning(
            "No feasible mission found after {} evaluations.",
            result.evaluations,
        )

    return result
