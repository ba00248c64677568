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
"""Unit tests for the ``swarmcollect.woa`` module."""

from __future__ import annotations

from pydantic import ValidationError
import pytest

from swarmcollect.evaluator import MissionEvaluator
from swarmcollect.moo import StepSnapshot, evaluation_budget
from swarmcollect.predeploy import Deployment, predeploy
from swarmcollect.scenario import Scenario, generate_scenario
from swarmcollect.woa import WoaParams, ins_woa


def _objectives(archive) -> list[tuple[float, ...]]:
    return [tuple(m.objectives.as_array().tolist()) for m in archive.members]


def test_run_uses_the_budget(
    small_scenario: Scenario,
    small_deployment: Deployment,
    small_evaluator: MissionEvaluator,
    tiny_woa: WoaParams,
) -> None:
    """Test that a run uses exactly the expected number of evaluations."""
    archive = ins_woa(small_scenario, small_deployment, tiny_woa)
    expected = evaluation_budget(small_evaluator.num_candidates, 6, 2)

    assert archive.engine == "ins-woa"
    assert archive.evaluations == expected
    assert 1 <= len(archive.members) <= tiny_woa.population


def test_steps_are_round_robin(
    small_scenario: Scenario,
    small_deployment: Deployment,
    small_evaluator: MissionEvaluator,
    tiny_woa: WoaParams,
) -> None:
    """Test that every candidate of every T-UAV is visited once."""
    snapshots: list[StepSnapshot] = []
    ins_woa(
        small_scenario,
        small_deployment,
        tiny_woa,
        on_step=snapshots.append,
    )

    assert len(snapshots) == small_evaluator.num_candidates
    assert [s.step for s in snapshots] == list(range(len(snapshots)))

    visited: dict[int, list[int]] = {}
    for snapshot in snapshots:
        visited.setdefault(snapshot.tuav, []).append(snapshot.candidate)

    for tuav, index in enumerate(small_evaluator.candidate_index):
        assert sorted(visited.get(tuav, [])) == list(range(len(index)))

    # The first round visits every T-UAV in index order.
    first_round = [s.tuav for s in snapshots[: small_evaluator.num_tuavs]]
    assert first_round == list(range(small_evaluator.num_tuavs))

    evaluations = [s.evaluations for s in snapshots]
    assert evaluations == [6 + 12 * (s + 1) for s in range(len(evaluations))]


def test_archive_matches_evaluations(
    small_scenario: Scenario,
    small_deployment: Deployment,
    small_evaluator: MissionEvaluator,
    tiny_woa: WoaParams,
) -> None:
    """Test that archived objectives are those of the archived missions."""
    archive = ins_woa(small_scenario, small_deployment, tiny_woa)
    for member in archive.members:
        small_evaluator.check_structure(member.solution)
        assert small_evaluator.evaluate(member.solution).as_array() == (
            pytest.approx(member.objectives.as_array())
        )
        report = small_evaluator.feasibility(member.solution)
        assert report.violation == pytest.approx(member.violation)

    assert all(m.rank == 0 for m in archive.members)


def test_run_is_deterministic(
    small_scenario: Scenario,
    small_deployment: Deployment,
    tiny_woa: WoaParams,
) -> None:
    """Test that runs only depend on their seed, not on the threads."""
    first = ins_woa(small_scenario, small_deployment, tiny_woa)
    second = ins_woa(small_scenario, small_deployment, tiny_woa)
    threaded = ins_woa(
        small_scenario,
        small_deployment,
        tiny_woa.model_copy(update={"workers": 3}),
    )
    other = ins_woa(
        small_scenario,
        small_deployment,
        tiny_woa.model_copy(update={"seed": 4}),
    )

    assert _objectives(first) == _objectives(second)
    assert _objectives(first) == _objectives(threaded)
    assert _objectives(first) != _objectives(other)


def test_single_candidate_per_tuav() -> None:
    """Test a run where every T-UAV has a single hovering candidate."""
    scenario = generate_scenario(None, 4, 2, 2, 1, u_max=6)
    deployment = predeploy(scenario)
    archive = ins_woa(
        scenario,
        deployment,
        WoaParams(population=4, iterations=1, seed=0),
    )
    candidates = sum(len(g) for g in deployment.fermat_candidates)
    assert archive.evaluations == evaluation_budget(candidates, 4, 1)


@pytest.mark.parametrize(
    "kwargs",
    (
        {"population": 3},
        {"iterations": 0},
        {"offset_radius": 0.0},
        {"workers": 0},
        {"unknown": 1},
    ),
)
def test_params_validation(kwargs: dict) -> None:
    """Test that invalid parameters are refused."""
    with pytest.raises(ValidationError):
        WoaParams(**kwargs)


@pytest.mark.slow
def test_desk_scenario_is_feasible() -> None:
    """Test that a desk-scale run finds feasible missions."""
    scenario = generate_scenario(None, 60, 3, 8, 1)
    deployment = predeploy(scenario)
    archive = ins_woa(
        scenario,
        deployment,
        WoaParams(population=10, iterations=5, seed=1),
    )

    assert archive.any_feasible
    extremes = archive.extremes()
    assert extremes["teu"].objectives.teu <= extremes["adg"].objectives.teu
    assert extremes["adg"].objectives.adg <= extremes["teu"].objectives.adg
