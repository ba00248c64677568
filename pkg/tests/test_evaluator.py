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
"""Unit tests for the ``swarmcollect.evaluator`` module."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from swarmcollect.channel import a2a_rate, g2a_rate
from swarmcollect.energy import flight_speed, hover_power, tuav_energy
from swarmcollect.evaluator import (
    MissionEvaluator,
    ObjectiveVector,
    Solution,
    breakdown,
    evaluate,
    feasibility,
)
from swarmcollect.predeploy import Deployment, predeploy
from swarmcollect.scenario import Scenario, generate_scenario


@pytest.fixture(scope="module")
def single_user() -> tuple[Scenario, Deployment]:
    """Get a scenario with a single ground user and a single T-UAV."""
    scenario = generate_scenario(None, 1, 1, 1, 4)
    return scenario, predeploy(scenario)


def test_single_user_objectives(
    single_user: tuple[Scenario, Deployment],
) -> None:
    """Test the objectives of the simplest mission by hand."""
    scenario, deployment = single_user
    evaluator = MissionEvaluator(scenario, deployment)
    solution = evaluator.default_solution()

    gu = scenario.gus[0].position.as_array()
    site = deployment.swarm_sites[0].as_array()
    hover = np.array([gu[0], gu[1], 30.0])
    assert solution.hover_points[0][0].as_array() == pytest.approx(hover)

    t_g2a = 1e7 / g2a_rate(gu, hover, 1.0, scenario.channel)
    t_a2a = 1e7 / a2a_rate(5.0, scenario.channel)
    energy = tuav_energy(
        [site, hover],
        [t_g2a + t_a2a],
        5.0,
        [t_a2a],
        scenario.energy,
    )
    mission = t_g2a + t_a2a + 90.0 / flight_speed(scenario.energy)
    teu = energy.total + hover_power(scenario.energy) * mission

    objectives = evaluator.evaluate(solution)
    assert objectives.teu == pytest.approx(teu)
    assert objectives.aeg == pytest.approx(1.0 * t_g2a)
    assert objectives.adg == pytest.approx(t_g2a + t_a2a)
    assert objectives.is_finite


def test_breakdown_is_consistent(small_evaluator: MissionEvaluator) -> None:
    """Test that the breakdown adds up to the objectives."""
    solution = small_evaluator.default_solution()
    details = small_evaluator.breakdown(solution)
    objectives = details.objectives

    teu = sum(details.swarm_energies) + sum(
        e.total for e in details.tuav_energies
    )
    assert objectives.teu == pytest.approx(teu)
    assert objectives.aeg == pytest.approx(np.mean(details.gu_energies))
    assert objectives.adg == pytest.approx(
        np.mean(np.add(details.g2a_delays, details.a2a_delays)),
    )

    deployment = small_evaluator.deployment
    for swarm, time in enumerate(details.swarm_times):
        members = deployment.swarm_members(swarm)
        assert time == pytest.approx(
            max(details.tuav_mission_times[m] for m in members),
        )

    for tuav, durations in enumerate(details.hover_durations):
        assert len(durations) == len(deployment.fermat_candidates[tuav])
        assert all(d > 0 for d in durations)


def test_module_functions(
    small_scenario: Scenario,
    small_deployment: Deployment,
    small_evaluator: MissionEvaluator,
) -> None:
    """Test that module functions match the evaluator methods."""
    solution = small_evaluator.default_solution()
    assert evaluate(
        small_scenario,
        small_deployment,
        solution,
    ) == small_evaluator.evaluate(solution)
    assert feasibility(
        small_scenario,
        small_deployment,
        solution,
    ) == small_evaluator.feasibility(solution)
    assert breakdown(
        small_scenario,
        small_deployment,
        solution,
    ) == small_evaluator.breakdown(solution)


def test_evaluations_are_counted(small_evaluator: MissionEvaluator) -> None:
    """Test that only evaluations are counted."""
    solution = small_evaluator.default_solution()
    assert small_evaluator.evaluations == 0

    small_evaluator.evaluate(solution)
    small_evaluator.feasibility(solution)
    small_evaluator.breakdown(solution)
    assert small_evaluator.evaluations == 1

    small_evaluator.evaluate_arrays(
        *small_evaluator.to_arrays(solution),
        count=False,
    )
    assert small_evaluator.evaluations == 1

    with ThreadPoolExecutor(max_workers=4) as executor:
        results = small_evaluator.evaluate_many(
            [solution] * 8,
            executor=executor,
        )

    assert small_evaluator.evaluations == 9
    assert results == [small_evaluator.evaluate(solution)] * 8


def test_ordering_only_changes_energy(
    small_evaluator: MissionEvaluator,
) -> None:
    """Test that the visiting order only changes the UAV energy."""
    tuav = next(
        m
        for m, index in enumerate(small_evaluator.candidate_index)
        if len(index) >= 2
    )
    solution = small_evaluator.default_solution()
    orderings = list(solution.orderings)
    orderings[tuav] = tuple(reversed(orderings[tuav]))
    reordered = solution.model_copy(update={"orderings": tuple(orderings)})

    first = small_evaluator.evaluate(solution)
    second = small_evaluator.evaluate(reordered)
    assert first.aeg == pytest.approx(second.aeg)
    assert first.adg == pytest.approx(second.adg)
    assert first.teu != pytest.approx(second.teu, rel=1e-12)


def test_higher_powers_reduce_delays(
    small_evaluator: MissionEvaluator,
) -> None:
    """Test that the delay decreases when ground users transmit harder."""
    low = small_evaluator.evaluate(
        small_evaluator.default_solution(gu_power=0.05),
    )
    high = small_evaluator.evaluate(
        small_evaluator.default_solution(gu_power=0.5),
    )
    assert high.adg < low.adg


def test_feasibility_reports(small_evaluator: MissionEvaluator) -> None:
    """Test that violations are detailed per constraint."""
    report = small_evaluator.feasibility(
        small_evaluator.default_solution(altitude=150.0, gu_power=2.0),
    )
    assert not report.feasible
    constraints = {d.constraint for d in report.details}
    assert {"hover_altitude", "gu_power"} <= constraints

    altitude = [d for d in report.details if d.constraint == "hover_altitude"]
    assert len(altitude) == small_evaluator.num_candidates
    assert altitude[0].excess == pytest.approx(50.0)
    assert altitude[0].subject == "candidate 0"
    assert report.violation == pytest.approx(
        sum(d.normalized for d in report.details),
    )


def test_delay_excess_in_seconds() -> None:
    """Test that delay excesses are in seconds, scaled per ground user."""
    scenario = generate_scenario(
        None,
        6,
        1,
        2,
        4,
        max_delay_range=(1e-4, 2e-4),
    )
    evaluator = MissionEvaluator(scenario, predeploy(scenario))
    solution = evaluator.default_solution()
    report = evaluator.feasibility(solution)
    details = evaluator.breakdown(solution)

    delays = [d for d in report.details if d.constraint == "delay"]
    assert len(delays) == 6
    for violation in delays:
        gu = int(violation.subject.split()[1])
        limit = scenario.gus[gu].max_delay
        total = details.g2a_delays[gu] + details.a2a_delays[gu]
        assert violation.scale == pytest.approx(limit)
        assert violation.excess == pytest.approx(total - limit)
        assert violation.normalized == pytest.approx((total - limit) / limit)

    assert report.violation == pytest.approx(
        sum(d.normalized for d in report.details),
    )


def test_feasible_reference_mission(
    single_user: tuple[Scenario, Deployment],
) -> None:
    """Test that hovering low above a lone ground user is feasible."""
    scenario, deployment = single_user
    evaluator = MissionEvaluator(scenario, deployment)
    report = evaluator.feasibility(evaluator.default_solution())
    assert report.feasible
    assert report.details == ()


def test_silent_ground_user(small_evaluator: MissionEvaluator) -> None:
    """Test that a ground user that cannot transmit has infinite costs."""
    solution = small_evaluator.default_solution()
    powers = list(solution.gu_powers)
    powers[0] = 0.0
    silent = solution.model_copy(update={"gu_powers": tuple(powers)})

    objectives, violation = small_evaluator.evaluate_arrays(
        *small_evaluator.to_arrays(silent),
    )
    assert not np.all(np.isfinite(objectives))
    assert violation > 0
    assert not ObjectiveVector.from_array(objectives).is_finite


@pytest.mark.parametrize(
    "field,value,message",
    (
        ("gu_powers", (1.0,), r"one power per ground user"),
        ("relay_powers", (), r"one relay power"),
        ("orderings", ((),), r"one ordering"),
    ),
)
def test_structure_errors(
    small_evaluator: MissionEvaluator,
    field: str,
    value: tuple,
    message: str,
) -> None:
    """Test that solutions must have the shape of the deployment."""
    solution = small_evaluator.default_solution()
    broken = solution.model_copy(update={field: value})
    with pytest.raises(ValueError, match=message):
        small_evaluator.evaluate(broken)


def test_ordering_must_be_a_permutation(
    small_evaluator: MissionEvaluator,
) -> None:
    """Test that orderings must visit every candidate once."""
    solution = small_evaluator.default_solution()
    orderings = [tuple(o) for o in solution.orderings]
    orderings[0] = (0,) * len(orderings[0])
    if len(orderings[0]) == 1:
        orderings[0] = (0, 0)

    broken = Solution.model_validate(
        {**solution.model_dump(), "orderings": tuple(orderings)},
    )
    with pytest.raises(ValueError, match=r"not a permutation"):
        small_evaluator.check_structure(broken)


def test_marginals(small_evaluator: MissionEvaluator) -> None:
    """Test that the predicted changes match a lone visit."""
    solution = small_evaluator.default_solution()
    hover, _, gu_powers, relay_powers = small_evaluator.to_arrays(solution)
    tuav = 0
    index = small_evaluator.candidate_index[tuav]
    start = small_evaluator.tuav_sites[tuav]

    deltas = small_evaluator.marginals(
        tuav,
        start,
        list(range(len(index))),
        hover,
        gu_powers,
        float(relay_powers[tuav]),
    )
    assert deltas.shape == (len(index), 3)
    assert np.all(deltas > 0)

    details = small_evaluator.breakdown(solution)
    members = small_evaluator.candidate_members[index[0]]
    adg_share = sum(
        details.g2a_delays[gu] + details.a2a_delays[gu] for gu in members
    ) / small_evaluator.num_gus
    assert deltas[0, 2] == pytest.approx(adg_share)


def test_mismatching_deployment(small_deployment: Deployment) -> None:
    """Test that a deployment must connect every ground user."""
    with pytest.raises(ValueError, match=r"ground user"):
        MissionEvaluator(generate_scenario(None, 5, 2, 3, 0), small_deployment)
