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
"""Experiment runner for swarmcollect.

An experiment runs every engine of a plan over scenarios generated for
every number of ground users and every seed of the plan, then exports the
archives, the trajectories and summary tables into an output directory.
Independent runs are executed in worker threads, and the results are
aggregated in a fixed order, so that exported archives only depend on the
configuration.
"""

from __future__ import annotations

import asyncio
from collections.abc import Sequence
from enum import StrEnum
import os
from os import PathLike
from pathlib import Path
import tempfile
import time
from typing import Annotated, NamedTuple

from annotated_types import Ge, Gt, MinLen
from loguru import logger
import numpy as np
import numpy.typing as npt
import pandas as pd
from pydantic import BaseModel, ConfigDict

from .evaluator import ObjectiveVector, Solution
from .exc import ConfigurationError, InfeasibleRunError
from .moo import (
    ArchiveMember,
    ParetoArchive,
    compromise_index,
    evaluation_budget,
    hypervolume,
)
from .nsga2 import Nsga2Params, nsga2
from .predeploy import Deployment, predeploy, save_deployment
from .scenario import (
    AreaBounds,
    ParameterTable,
    Point3,
    Scenario,
    generate_scenario,
    load_model,
    parse_section,
    read_toml,
    save_scenario,
)
from .woa import WoaParams, ins_woa


__all__ = [
    "Engine",
    "ExperimentPlan",
    "ProjectConfig",
    "RecordSet",
    "Report",
    "RunRecord",
    "RunResult",
    "SwarmSettings",
    "Trajectory",
    "build_trajectory",
    "export_archive",
    "export_report",
    "load_config",
    "load_results",
    "normalised_hypervolumes",
    "report",
    "run_plan",
    "select_compromise",
]

POWER_BINS = (0.0, 0.25, 0.5, 0.75, 1.0)
"""Edges of the ground user power histogram bins, in W."""

LOW_POWER = 0.5
"""Power under which a ground user is counted as transmitting low, in W."""

HV_REFERENCE = 1.1
"""Reference point of the normalised hypervolume, on every objective."""


class Engine(StrEnum):
    """Optimisation engine."""

    INS_WOA = "ins-woa"
    """Whale optimisation with greedy hover sequencing."""

    NSGA2 = "nsga2"
    """Genetic baseline."""


class SwarmSettings(BaseModel):
    """Sizing of the swarms, as the ``[swarms]`` configuration section."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    num_swarms: Annotated[int, Ge(1)] = 3
    """Number of swarms."""

    num_tuavs: Annotated[int, Ge(1)] = 8
    """Total number of T-UAVs."""

    m_max: Annotated[int, Ge(1)] = 3
    """Maximum number of T-UAVs per swarm."""

    u_max: Annotated[int, Ge(1)] = 6
    """Maximum number of ground users per hovering location."""


class ExperimentPlan(BaseModel):
    """Plan of an experiment, as the ``[experiment]`` configuration section."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    users: Annotated[tuple[Annotated[int, Ge(1)], ...], MinLen(1)] = (60,)
    """Numbers of ground users to generate scenarios for."""

    engines: Annotated[tuple[Engine, ...], MinLen(1)] = (
        Engine.INS_WOA,
        Engine.NSGA2,
    )
    """Engines to run on every scenario."""

    seeds: Annotated[tuple[int, ...], MinLen(1)] = (1,)
    """Seeds, each giving a scenario and the seed of the engines."""

    budget: Annotated[int, Gt(0)] | None = None
    """Evaluation cap per run.

    If None, the budget of the whale engine with its configured
    parameters is used.
    """

    outputs: str = "results"
    """Directory to write the results into."""

    concurrency: Annotated[int, Ge(1)] = 1
    """Number of runs executed at the same time."""


class ProjectConfig(BaseModel):
    """Complete configuration of swarmcollect."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    area: AreaBounds = AreaBounds()
    swarms: SwarmSettings = SwarmSettings()
    parameters: ParameterTable = ParameterTable()
    woa: WoaParams = WoaParams()
    nsga2: Nsga2Params = Nsga2Params()
    experiment: ExperimentPlan = ExperimentPlan()

    def scenario(self, num_gus: int, seed: int, /) -> Scenario:
        """Generate a scenario following the configuration.

        :param num_gus: Number of ground users.
        :param seed: Seed of the scenario.
        :return: Scenario.
        :raises ConfigurationError: The configuration is infeasible.
        """
        channel, energy = self.parameters.to_params()
        return generate_scenario(
            self.area,
            num_gus,
            self.swarms.num_swarms,
            self.swarms.num_tuavs,
            seed,
            m_max=self.swarms.m_max,
            u_max=self.swarms.u_max,
            channel=channel,
            energy=energy,
            data_size=self.parameters.data_size,
            max_delay=self.parameters.max_delay,
        )


def load_config(path: str | PathLike[str] | None = None, /) -> ProjectConfig:
    """Load a configuration file.

    Every section is optional; unknown sections and keys are reported with
    a warning and ignored.

    :param path: Path of the TOML file to read, defaults only if None.
    :return: Configuration.
    :raises ScenarioDecodeError: The file is malformed.
    """
    if path is None:
        return ProjectConfig()

    document = read_toml(path)
    sections = {
        name: parse_section(
            ProjectConfig.model_fields[name].annotation,  # type: ignore
            document.get(name),
            section=name,
        )
        for name in ProjectConfig.model_fields
        if name in document
    }
    for name in document:
        if name not in ProjectConfig.model_fields:
            logger.warning("Ignoring unknown section {!r}.", name)

    return ProjectConfig(**sections)


class RunRecord(BaseModel):
    """Summary of one run of an engine over one scenario."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )
    """Model configuration."""

    engine: Engine
    users: Annotated[int, Ge(1)]
    seed: int
    wall_time: Annotated[float, Ge(0)]
    """Duration of the optimisation, in seconds."""

    evaluations: Annotated[int, Ge(0)]
    budget: Annotated[int, Gt(0)]
    members: Annotated[int, Ge(0)]
    """Number of archive members."""

    feasible: Annotated[int, Ge(0)]
    """Number of feasible archive members."""

    minimum: ObjectiveVector
    """Best value of every objective over the feasible members."""

    median: ObjectiveVector
    """Median of every objective over the feasible members."""

    hypervolume: Annotated[float, Ge(0)] = 0.0
    """Hypervolume over objectives normalised on the same scenario."""

    compromise: ArchiveMember | None = None
    """Compromise member of the archive."""


class RecordSet(BaseModel):
    """Records of an experiment, as persisted in ``records.json``."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )

    records: tuple[RunRecord, ...]


class RunResult(NamedTuple):
    """Record and archive of a run."""

    record: RunRecord
    archive: ParetoArchive


class HoverStop(BaseModel):
    """Hovering position of a trajectory."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    candidate: Annotated[int, Ge(0)]
    position: Point3
    gus: tuple[int, ...]
    gu_powers: tuple[float, ...]


class TuavTrajectory(BaseModel):
    """Trajectory of a T-UAV."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    tuav: Annotated[int, Ge(0)]
    swarm: Annotated[int, Ge(0)]
    site: Point3
    relay_power: float
    stops: tuple[HoverStop, ...]


class Trajectory(BaseModel):
    """Trajectories of every T-UAV for a mission."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )

    objectives: ObjectiveVector
    tuavs: tuple[TuavTrajectory, ...]


def build_trajectory(
    deployment: Deployment,
    member: ArchiveMember,
    /,
) -> Trajectory:
    """Describe the trajectories of a mission, in visiting order.

    :param deployment: Deployment the mission was planned on.
    :param member: Archive member holding the mission.
    :return: Trajectory document.
    """
    solution = member.solution
    tuavs = []
    for tuav, groups in enumerate(deployment.fermat_candidates):
        stops = []
        for n in solution.orderings[tuav]:
            gus = tuple(groups[n].members)
            stops.append(
                HoverStop(
                    candidate=n,
                    position=solution.hover_points[tuav][n],
                    gus=gus,
                    gu_powers=tuple(solution.gu_powers[u] for u in gus),
                ),
            )

        tuavs.append(
            TuavTrajectory(
                tuav=tuav,
                swarm=deployment.tuav_swarms[tuav],
                site=deployment.site_of(tuav),
                relay_power=solution.relay_powers[tuav],
                stops=tuple(stops),
            ),
        )

    return Trajectory(objectives=member.objectives, tuavs=tuple(tuavs))


def _compromise_member(archive: ParetoArchive, /) -> ArchiveMember:
    pool = archive.feasible_members or archive.members
    values = np.array([m.objectives.as_array() for m in pool])
    return pool[compromise_index(values)]


def select_compromise(archive: ParetoArchive, /) -> Solution:
    """Select the compromise solution of an archive.

    Feasible members are preferred. Objectives are min-max scaled over the
    members, and the member with the lowest sum of scaled objectives is
    chosen, ties being broken by the lowest index.

    :param archive: Archive to select from.
    :return: Compromise solution.
    :raises ValueError: The archive is empty.
    """
    if not archive.members:
        raise ValueError("Cannot select a compromise in an empty archive.")

    return _compromise_member(archive).solution


class _Instance(NamedTuple):
    users: int
    seed: int
    scenario: Scenario
    deployment: Deployment
    woa: WoaParams
    budget: int


def _prepare(config: ProjectConfig, users: int, seed: int, /) -> _Instance:
    """Generate and pre-deploy a scenario, and compute its budget."""
    scenario = config.scenario(users, seed)
    deployment = predeploy(scenario)
    candidates = sum(len(g) for g in deployment.fermat_candidates)
    woa = config.woa.model_copy(update={"seed": seed})

    cap = config.experiment.budget
    if cap is not None:
        population = woa.population
        iterations = (cap // population - 1) // max(candidates, 1)
        if iterations < 1:
            raise ConfigurationError(
                violations=[
                    f"Budget {cap} is below the minimum of "
                    + f"{evaluation_budget(candidates, population, 1)} "
                    + f"evaluations for {users} ground users.",
                ],
            )

        woa = woa.model_copy(update={"iterations": iterations})

    budget = evaluation_budget(candidates, woa.population, woa.iterations)
    return _Instance(users, seed, scenario, deployment, woa, budget)


def _optimise(
    config: ProjectConfig,
    instance: _Instance,
    engine: Engine,
    /,
) -> tuple[ParetoArchive, float]:
    """Run an engine over an instance."""
    start = time.perf_counter()
    if engine == Engine.INS_WOA:
        archive = ins_woa(instance.scenario, instance.deployment, instance.woa)
    else:
        params = config.nsga2.model_copy(update={"seed": instance.seed})
        archive = nsga2(
            instance.scenario,
            instance.deployment,
            params,
            budget=instance.budget,
        )

    wall_time = time.perf_counter() - start
    logger.info(
        "{} over {} ground users with seed {}: {} member(s) in {:.2f}s.",
        engine.value,
        instance.users,
        instance.seed,
        len(archive.members),
        wall_time,
    )
    return archive, wall_time


def _feasible_objectives(archive: ParetoArchive, /) -> npt.NDArray[np.float64]:
    values = np.array(
        [m.objectives.as_array() for m in archive.feasible_members],
    ).reshape(-1, 3)
    return values[np.all(np.isfinite(values), axis=1)]


def normalised_hypervolumes(
    archives: Sequence[ParetoArchive],
    /,
) -> list[float]:
    """Get the hypervolumes of archives obtained on the same scenario.

    Objectives of the feasible members are min-max scaled over the union of
    the archives, and the hypervolume is computed with a reference point of
    1.1 on every scaled objective.

    :param archives: Archives to compare.
    :return: Hypervolume of every archive, 0 if it has no feasible member.
    """
    values = [_feasible_objectives(archive) for archive in archives]
    union = np.vstack([np.empty((0, 3)), *values])
    if not len(union):
        return [0.0 for _ in archives]

    low = union.min(axis=0)
    spread = union.max(axis=0) - low
    spread = np.where(spread > 0, spread, 1.0)
    reference = np.full(3, HV_REFERENCE)
    return [hypervolume((v - low) / spread, reference) for v in values]


def _summarise(
    engine: Engine,
    instance: _Instance,
    archive: ParetoArchive,
    wall_time: float,
    hv: float,
    /,
) -> RunRecord:
    values = _feasible_objectives(archive)
    if len(values):
        minimum = ObjectiveVector.from_array(values.min(axis=0))
        median = ObjectiveVector.from_array(np.median(values, axis=0))
    else:
        minimum = median = ObjectiveVector.from_array(np.full(3, np.inf))

    return RunRecord(
        engine=engine,
        users=instance.users,
        seed=instance.seed,
        wall_time=wall_time,
        evaluations=archive.evaluations,
        budget=instance.budget,
        members=len(archive.members),
        feasible=len(archive.feasible_members),
        minimum=minimum,
        median=median,
        hypervolume=hv,
        compromise=_compromise_member(archive) if archive.members else None,
    )


def _write_atomic(path: Path, content: str, /) -> None:
    """Write a file so that readers never see a partial content."""
    fd, temp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as file:
            file.write(content)

        os.replace(temp, path)
    except BaseException:
        Path(temp).unlink(missing_ok=True)
        raise


def export_archive(
    archive: ParetoArchive,
    deployment: Deployment,
    directory: Path,
    name: str,
    /,
) -> None:
    """Write the files describing the archive of a run.

    These are ``archive-{name}.csv``, with one row per member,
    ``archive-{name}.json`` with the solutions, and
    ``trajectory-{name}.json`` with the trajectories of the compromise
    member, if the archive is not empty.

    :param archive: Archive to export.
    :param deployment: Deployment the archive was obtained on.
    :param directory: Directory to write the files into.
    :param name: Name of the run.
    """
    _write_atomic(
        directory / f"archive-{name}.csv",
        archive.to_frame().to_csv(index=False),
    )
    _write_atomic(
        directory / f"archive-{name}.json",
        archive.model_dump_json(indent=2) + "\n",
    )
    if archive.members:
        trajectory = build_trajectory(deployment, _compromise_member(archive))
        _write_atomic(
            directory / f"trajectory-{name}.json",
            trajectory.model_dump_json(indent=2) + "\n",
        )


def _run_name(engine: Engine, users: int, seed: int, /) -> str:
    return f"{engine.value}-u{users}-s{seed}"


def _records_frame(records: Sequence[RunRecord], /) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "engine": r.engine.value,
                "users": r.users,
                "seed": r.seed,
                "wall_time": r.wall_time,
                "evaluations": r.evaluations,
                "budget": r.budget,
                "members": r.members,
                "feasible": r.feasible,
                "teu_min": r.minimum.teu,
                "teu_median": r.median.teu,
                "aeg_min": r.minimum.aeg,
                "aeg_median": r.median.aeg,
                "adg_min": r.minimum.adg,
                "adg_median": r.median.adg,
                "hypervolume": r.hypervolume,
            }
            for r in records
        ],
        columns=[
            "engine",
            "users",
            "seed",
            "wall_time",
            "evaluations",
            "budget",
            "members",
            "feasible",
            "teu_min",
            "teu_median",
            "aeg_min",
            "aeg_median",
            "adg_min",
            "adg_median",
            "hypervolume",
        ],
    )


class SeriesPoint(BaseModel):
    """Mean results of an engine for a number of ground users."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )

    engine: Engine
    users: int
    runs: int
    teu: float
    aeg: float
    adg: float
    hypervolume: float
    wall_time: float


class MemberProfile(BaseModel):
    """Power and altitude profile of a remarkable archive member."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    engine: Engine
    users: int
    seed: int
    member: str
    """One of ``teu``, ``aeg``, ``adg`` and ``compromise``."""

    power_counts: tuple[int, ...]
    """Number of ground users in every power bin."""

    mean_power: float
    mean_altitude: float


class CompromiseEntry(BaseModel):
    """Compromise solution of a run."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )

    engine: Engine
    users: int
    seed: int
    objectives: ObjectiveVector
    low_power_share: float
    """Share of the ground users transmitting at 0.5 W or less."""


class Report(BaseModel):
    """Summary document of an experiment."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        ser_json_inf_nan="constants",
    )

    power_bins: tuple[float, ...] = POWER_BINS
    series: tuple[SeriesPoint, ...]
    """Mean objectives per engine and number of ground users."""

    histograms: tuple[MemberProfile, ...]
    """Power histograms of the extreme and compromise members."""

    altitudes: dict[str, float]
    """Mean hovering altitude of every kind of extreme member."""

    wall_times: dict[str, dict[int, float]]
    """Mean wall time per engine and number of ground users."""

    compromises: tuple[CompromiseEntry, ...]


def _profile(
    result: RunResult,
    name: str,
    member: ArchiveMember,
    /,
) -> MemberProfile:
    powers = np.array(member.solution.gu_powers)
    edges = np.array(POWER_BINS)
    edges[-1] = max(edges[-1], float(powers.max()))
    counts, _ = np.histogram(powers, bins=edges)
    altitudes = [
        p.z for points in member.solution.hover_points for p in points
    ]
    return MemberProfile(
        engine=result.record.engine,
        users=result.record.users,
        seed=result.record.seed,
        member=name,
        power_counts=tuple(int(c) for c in counts),
        mean_power=float(powers.mean()),
        mean_altitude=float(np.mean(altitudes)) if altitudes else 0.0,
    )


def report(results: Sequence[RunResult], /) -> Report:
    """Build the summary document of an experiment.

    :param results: Results of the runs.
    :return: Report.
    :raises ValueError: No results are provided.
    """
    if not results:
        raise ValueError("Cannot report on no runs.")

    frame = _records_frame([r.record for r in results])
    grouped = frame.groupby(["engine", "users"], sort=True)
    series = tuple(
        SeriesPoint(
            engine=Engine(engine),
            users=int(users),
            runs=len(group),
            teu=float(group["teu_min"].mean()),
            aeg=float(group["aeg_min"].mean()),
            adg=float(group["adg_min"].mean()),
            hypervolume=float(group["hypervolume"].mean()),
            wall_time=float(group["wall_time"].mean()),
        )
        for (engine, users), group in grouped
    )

    profiles: list[MemberProfile] = []
    compromises: list[CompromiseEntry] = []
    for result in results:
        if not result.archive.members:
            continue

        for name, member in result.archive.extremes().items():
            profiles.append(_profile(result, name, member))

        compromise = _compromise_member(result.archive)
        profiles.append(_profile(result, "compromise", compromise))
        powers = np.array(compromise.solution.gu_powers)
        compromises.append(
            CompromiseEntry(
                engine=result.record.engine,
                users=result.record.users,
                seed=result.record.seed,
                objectives=compromise.objectives,
                low_power_share=float(np.mean(powers <= LOW_POWER)),
            ),
        )

    altitudes = {
        name: float(
            np.mean([p.mean_altitude for p in profiles if p.member == name]),
        )
        for name in ("teu", "aeg", "adg")
        if any(p.member == name for p in profiles)
    }
    wall_times: dict[str, dict[int, float]] = {}
    for point in series:
        wall_times.setdefault(point.engine.value, {})[point.users] = (
            point.wall_time
        )

    return Report(
        series=series,
        histograms=tuple(profiles),
        altitudes=altitudes,
        wall_times=wall_times,
        compromises=tuple(compromises),
    )


def export_report(
    results: Sequence[RunResult],
    out: Path,
    /,
) -> Report:
    """Write the tables and the report of an experiment.

    These are ``summary.csv`` with one row per run, ``records.json``,
    ``series.csv`` with the mean results per engine and number of ground
    users, and ``report.json``.

    :param results: Results of the runs.
    :param out: Directory to write the files into.
    :return: Report.
    """
    records = [r.record for r in results]
    _write_atomic(
        out / "summary.csv",
        _records_frame(records).to_csv(index=False),
    )
    _write_atomic(
        out / "records.json",
        RecordSet(records=tuple(records)).model_dump_json(indent=2) + "\n",
    )

    document = report(results)
    _write_atomic(
        out / "series.csv",
        pd.DataFrame(
            [p.model_dump() for p in document.series],
            columns=list(SeriesPoint.model_fields),
        ).to_csv(index=False),
    )
    _write_atomic(
        out / "report.json",
        document.model_dump_json(indent=2) + "\n",
    )
    return document


async def run_plan(
    config: ProjectConfig,
    /,
    *,
    out: str | PathLike[str] | None = None,
) -> list[RunResult]:
    """Run the experiment plan of a configuration.

    Scenarios are generated and pre-deployed for every number of ground
    users and every seed, then every engine is run on every scenario. At
    most ``concurrency`` of these jobs run at the same time, in worker
    threads. Per-run files are written as soon as all runs are done, in
    plan order.

    :param config: Configuration holding the plan.
    :param out: Output directory, overriding the one of the plan.
    :return: Results, ordered by number of users, seed, then engine.
    :raises ConfigurationError: A scenario or the budget is infeasible.
    :raises InfeasibleRunError: A run found no feasible mission; every file
        is still written.
    """
    plan = config.experiment
    directory = Path(out if out is not None else plan.outputs)
    directory.mkdir(parents=True, exist_ok=True)
    semaphore = asyncio.Semaphore(plan.concurrency)

    async def prepare(users: int, seed: int, /) -> _Instance:
        async with semaphore:
            return await asyncio.to_thread(_prepare, config, users, seed)

    async def optimise(
        instance: _Instance,
        engine: Engine,
        /,
    ) -> tuple[ParetoArchive, float]:
        async with semaphore:
            return await asyncio.to_thread(
                _optimise,
                config,
                instance,
                engine,
            )

    instances = await asyncio.gather(
        *(prepare(u, s) for u in plan.users for s in plan.seeds),
    )
    outcomes = await asyncio.gather(
        *(optimise(i, e) for i in instances for e in plan.engines),
    )

    results: list[RunResult] = []
    for position, instance in enumerate(instances):
        suffix = f"u{instance.users}-s{instance.seed}"
        save_scenario(instance.scenario, directory / f"scenario-{suffix}.json")
        save_deployment(
            instance.deployment,
            directory / f"deployment-{suffix}.json",
        )

        start = position * len(plan.engines)
        runs = outcomes[start : start + len(plan.engines)]
        hvs = normalised_hypervolumes([archive for archive, _ in runs])
        for engine, (archive, wall_time), hv in zip(plan.engines, runs, hvs):
            export_archive(
                archive,
                instance.deployment,
                directory,
                _run_name(engine, instance.users, instance.seed),
            )

            results.append(
                RunResult(
                    _summarise(engine, instance, archive, wall_time, hv),
                    archive,
                ),
            )

    export_report(results, directory)

    for result in results:
        if not result.archive.any_feasible:
            raise InfeasibleRunError(result.archive)

    return results


def load_results(directory: str | PathLike[str], /) -> list[RunResult]:
    """Load the results of an experiment from its output directory.

    :param directory: Output directory of the experiment.
    :return: Results, in the order of the records.
    :raises ScenarioDecodeError: A file is malformed.
    """
    directory = Path(directory)
    records = load_model(
        RecordSet,
        (directory / "records.json").read_bytes(),
    ).records
    return [
        RunResult(
            record,
            load_model(
                ParetoArchive,
                (
                    directory
                    / (
                        "archive-"
                        + _run_name(record.engine, record.users, record.seed)
                        + ".json"
                    )
                ).read_bytes(),
            ),
        )
        for record in records
    ]
