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
"""Unit tests for the ``swarmcollect.harness`` module."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from swarmcollect.evaluator import MissionEvaluator, ObjectiveVector
from swarmcollect.exc import (
    ConfigurationError,
    InfeasibleRunError,
    ScenarioDecodeError,
)
from swarmcollect.harness import (
    POWER_BINS,
    Engine,
    ExperimentPlan,
    ProjectConfig,
    RunRecord,
    RunResult,
    SwarmSettings,
    build_trajectory,
    export_archive,
    export_report,
    load_config,
    load_results,
    normalised_hypervolumes,
    report,
    run_plan,
    select_compromise,
)
from swarmcollect.moo import ParetoArchive, build_archive
from swarmcollect.nsga2 import Nsga2Params
from swarmcollect.predeploy import Deployment
from swarmcollect.woa import WoaParams


def _config(**plan) -> ProjectConfig:
    """Get a configuration for quick experiments over 12 ground users."""
    return ProjectConfig(
        swarms=SwarmSettings(num_swarms=2, num_tuavs=3, m_max=2, u_max=3),
        woa=WoaParams(population=4, iterations=1),
        nsga2=Nsga2Params(population=4),
        experiment=ExperimentPlan(users=(12,), seeds=(5,), **plan),
    )


def _archive(
    evaluator: MissionEvaluator,
    points: list[list[float]],
    /,
    *,
    violations: list[float] | None = None,
) -> ParetoArchive:
    """Build an archive holding the default mission with given objectives."""
    solution = evaluator.default_solution()
    if violations is None:
        violations = [0.0] * len(points)

    return build_archive(
        [(solution, p, v) for p, v in zip(points, violations)],
        len(points),
        engine="test",
        evaluations=len(points),
    )


def test_load_config_defaults() -> None:
    """Test that no configuration file yields the defaults."""
    config = load_config()
    assert config == ProjectConfig()
    assert config.swarms.num_tuavs == 8
    assert config.experiment.engines == (Engine.INS_WOA, Engine.NSGA2)


def test_load_config(tmp_path: Path) -> None:
    """Test that sections are read, and unknown ones ignored."""
    path = tmp_path / "swarmcollect.toml"
    path.write_text(
        "[swarms]\nnum_swarms = 2\nnum_tuavs = 3\n\n"
        + "[parameters]\nalpha = 11.95\n\n"
        + "[woa]\npopulation = 10\nunknown = true\n\n"
        + "[experiment]\nusers = [20, 40]\nengines = [\"nsga2\"]\n\n"
        + "[plotting]\ncolour = \"blue\"\n",
    )

    config = load_config(path)
    assert config.swarms.num_swarms == 2
    assert config.swarms.num_tuavs == 3
    assert config.parameters.alpha == 11.95
    assert config.woa.population == 10
    assert config.woa.iterations == 50
    assert config.experiment.users == (20, 40)
    assert config.experiment.engines == (Engine.NSGA2,)
    assert config.nsga2 == Nsga2Params()


def test_load_config_errors(tmp_path: Path) -> None:
    """Test that invalid values are reported with their key."""
    path = tmp_path / "swarmcollect.toml"
    path.write_text("[woa]\npopulation = 2\n")

    with pytest.raises(ScenarioDecodeError) as exc_info:
        load_config(path)

    assert exc_info.value.key == "woa.population"


def test_project_scenario() -> None:
    """Test that scenarios follow the configured sizing."""
    scenario = _config().scenario(12, 5)
    assert len(scenario.gus) == 12
    assert scenario.num_swarms == 2
    assert scenario.num_tuavs == 3
    assert scenario.seed == 5
    assert scenario.model_dump() == _config().scenario(12, 5).model_dump()

    overfull = ProjectConfig(
        swarms=SwarmSettings(num_swarms=1, num_tuavs=3, m_max=2),
    )
    with pytest.raises(ConfigurationError):
        overfull.scenario(12, 5)


def test_normalised_hypervolumes(small_evaluator: MissionEvaluator) -> None:
    """Test hypervolumes normalised over the union of archives."""
    first = _archive(small_evaluator, [[0, 0, 0]])
    second = _archive(small_evaluator, [[1, 1, 1]])
    third = _archive(small_evaluator, [[0, 0, 0]], violations=[1.0])

    hvs = normalised_hypervolumes([first, second, third])
    assert hvs[0] == pytest.approx(1.1**3)
    assert hvs[1] == pytest.approx(0.1**3)
    assert hvs[2] == 0.0
    assert normalised_hypervolumes([third]) == [0.0]


def test_select_compromise(small_evaluator: MissionEvaluator) -> None:
    """Test that the compromise prefers balanced feasible members."""
    points = [[0, 10, 10], [10, 0, 10], [4, 4, 4], [0, 0, 0]]
    archive = build_archive(
        [
            (small_evaluator.default_solution(gu_power=0.1 * (i + 1)), p, v)
            for i, (p, v) in enumerate(zip(points, [0, 0, 0, 1.0]))
        ],
        4,
        engine="test",
        evaluations=4,
    )
    solution = select_compromise(archive)
    assert solution.gu_powers[0] == pytest.approx(0.3)

    with pytest.raises(ValueError):
        select_compromise(ParetoArchive(engine="test", members=()))


def test_build_trajectory(
    small_deployment: Deployment,
    small_evaluator: MissionEvaluator,
) -> None:
    """Test that trajectories follow the visiting order."""
    archive = _archive(small_evaluator, [[1, 2, 3]])
    member = archive.members[0]
    trajectory = build_trajectory(small_deployment, member)

    assert trajectory.objectives == member.objectives
    assert len(trajectory.tuavs) == len(small_deployment.fermat_candidates)
    for tuav, groups in zip(
        trajectory.tuavs,
        small_deployment.fermat_candidates,
    ):
        assert tuav.swarm == small_deployment.tuav_swarms[tuav.tuav]
        assert [s.candidate for s in tuav.stops] == list(
            member.solution.orderings[tuav.tuav],
        )
        assert sorted(u for s in tuav.stops for u in s.gus) == sorted(
            u for g in groups for u in g.members
        )
        for stop in tuav.stops:
            assert len(stop.gu_powers) == len(stop.gus)


def test_export_archive(
    tmp_path: Path,
    small_deployment: Deployment,
    small_evaluator: MissionEvaluator,
) -> None:
    """Test the files describing an archive."""
    archive = _archive(small_evaluator, [[0, 10, 1], [10, 0, 1]])
    export_archive(archive, small_deployment, tmp_path, "run")

    frame = pd.read_csv(tmp_path / "archive-run.csv")
    assert len(frame) == 2
    assert list(frame.columns) == [
        "rank",
        "crowding",
        "teu",
        "aeg",
        "adg",
        "violation",
    ]
    restored = ParetoArchive.model_validate_json(
        (tmp_path / "archive-run.json").read_text(),
    )
    assert restored == archive
    trajectory = json.loads((tmp_path / "trajectory-run.json").read_text())
    assert len(trajectory["tuavs"]) == small_deployment.num_tuavs

    empty = ParetoArchive(engine="test", members=())
    export_archive(empty, small_deployment, tmp_path, "empty")
    assert (tmp_path / "archive-empty.csv").exists()
    assert not (tmp_path / "trajectory-empty.json").exists()
    assert not list(tmp_path.glob(".*"))


def test_report_requires_results() -> None:
    """Test that reports cannot be built over no run."""
    with pytest.raises(ValueError):
        report([])


@pytest.mark.asyncio
async def test_run_plan(tmp_path: Path) -> None:
    """Test a complete experiment, and reloading its results."""
    config = _config(engines=(Engine.NSGA2, Engine.INS_WOA))
    try:
        results = await run_plan(config, out=tmp_path)
    except InfeasibleRunError:
        results = load_results(tmp_path)

    assert [(r.record.engine, r.record.users) for r in results] == [
        (Engine.NSGA2, 12),
        (Engine.INS_WOA, 12),
    ]
    woa, genetic = results[1].record, results[0].record
    assert woa.budget == genetic.budget
    assert woa.evaluations == woa.budget
    assert genetic.evaluations <= genetic.budget
    assert all(isinstance(r, RunResult) for r in results)

    for name in (
        "scenario-u12-s5.json",
        "deployment-u12-s5.json",
        "archive-ins-woa-u12-s5.csv",
        "archive-nsga2-u12-s5.json",
        "summary.csv",
        "records.json",
        "series.csv",
        "report.json",
    ):
        assert (tmp_path / name).exists(), name

    summary = pd.read_csv(tmp_path / "summary.csv")
    assert list(summary["engine"]) == ["nsga2", "ins-woa"]
    assert "teu_median" in summary.columns
    series = pd.read_csv(tmp_path / "series.csv")
    assert sorted(series["engine"]) == ["ins-woa", "nsga2"]

    document = json.loads((tmp_path / "report.json").read_text())
    assert document["power_bins"] == list(POWER_BINS)
    assert set(document["wall_times"]) == {"ins-woa", "nsga2"}

    loaded = load_results(tmp_path)
    assert [r.record for r in loaded] == [r.record for r in results]
    assert [r.archive for r in loaded] == [r.archive for r in results]

    for result in results:
        if result.archive.members:
            hist = [
                p
                for p in report(results).histograms
                if p.engine == result.record.engine
            ]
            assert {p.member for p in hist} == {
                "teu",
                "aeg",
                "adg",
                "compromise",
            }
            for profile in hist:
                assert sum(profile.power_counts) == 12


@pytest.mark.asyncio
async def test_run_plan_budget_too_low(tmp_path: Path) -> None:
    """Test that a budget below one iteration is refused."""
    with pytest.raises(ConfigurationError):
        await run_plan(_config(budget=5), out=tmp_path)


def test_export_report(
    tmp_path: Path,
    small_evaluator: MissionEvaluator,
) -> None:
    """Test the report over hand-built records."""
    archive = _archive(small_evaluator, [[0, 10, 1], [10, 0, 1]])
    results = [
        RunResult(
            RunRecord(
                engine=Engine.INS_WOA,
                users=12,
                seed=seed,
                wall_time=float(seed),
                evaluations=10,
                budget=10,
                members=2,
                feasible=2,
                minimum=ObjectiveVector.from_array(
                    np.array([seed, 0.0, 1.0]),
                ),
                median=ObjectiveVector.from_array(np.array([5.0, 5.0, 1.0])),
                hypervolume=0.5,
            ),
            archive,
        )
        for seed in (1, 3)
    ]

    document = export_report(results, tmp_path)
    assert len(document.series) == 1
    point = document.series[0]
    assert point.runs == 2
    assert point.teu == pytest.approx(2.0)
    assert point.wall_time == pytest.approx(2.0)
    assert document.wall_times == {"ins-woa": {12: pytest.approx(2.0)}}
    assert len(document.compromises) == 2
    assert len(document.histograms) == 8
    assert set(document.altitudes) == {"teu", "aeg", "adg"}

    records = json.loads((tmp_path / "records.json").read_text())
    assert [r["seed"] for r in records["records"]] == [1, 3]
