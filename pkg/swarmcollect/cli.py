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
"""Command-line interface of swarmcollect.

Exit codes are 0 on success, 1 on a configuration or input error, and 2
when an optimisation finishes without any feasible mission.
"""

from __future__ import annotations

from argparse import ArgumentParser, Namespace
import asyncio
from collections.abc import Sequence
from pathlib import Path
import sys

from loguru import logger

from .exc import (
    ConfigurationError,
    GeometryError,
    InfeasibleRunError,
    ScenarioDecodeError,
)
from .harness import (
    Engine,
    ProjectConfig,
    export_archive,
    export_report,
    load_config,
    load_results,
    run_plan,
)
from .moo import evaluation_budget
from .nsga2 import nsga2
from .predeploy import load_deployment, predeploy, save_deployment
from .scenario import load_scenario, save_scenario
from .woa import ins_woa


__all__ = ["main"]


def _config(args: Namespace, /) -> ProjectConfig:
    """Load the configuration, with the command-line overrides."""
    config = load_config(args.config)
    swarms = {
        key: value
        for key, value in (
            ("num_swarms", getattr(args, "swarms", None)),
            ("num_tuavs", getattr(args, "tuavs", None)),
        )
        if value is not None
    }
    if swarms:
        config = config.model_copy(
            update={"swarms": config.swarms.model_copy(update=swarms)},
        )

    return config


def _generate(args: Namespace, /) -> int:
    config = _config(args)
    users = args.users if args.users is not None else 60
    seed = args.seed if args.seed is not None else 0
    scenario = config.scenario(users, seed)
    out = Path(args.out or f"scenario-u{users}-s{seed}.json")
    save_scenario(scenario, out)
    logger.info("Scenario with {} ground users written to {}.", users, out)
    return 0


def _predeploy(args: Namespace, /) -> int:
    scenario = load_scenario(args.scenario)
    deployment = predeploy(scenario)
    out = Path(args.out or "deployment.json")
    save_deployment(deployment, out)
    logger.info("Deployment written to {}.", out)
    return 0


def _optimize(args: Namespace, /) -> int:
    config = _config(args)
    scenario = load_scenario(args.scenario)
    if args.deployment is not None:
        deployment = load_deployment(args.deployment)
    else:
        deployment = predeploy(scenario)

    seed = args.seed if args.seed is not None else scenario.seed
    woa = config.woa.model_copy(update={"seed": seed})
    candidates = sum(len(g) for g in deployment.fermat_candidates)
    budget = args.budget
    if budget is None:
        budget = evaluation_budget(candidates, woa.population, woa.iterations)

    engine = Engine(args.engine)
    if engine == Engine.INS_WOA:
        iterations = (budget // woa.population - 1) // max(candidates, 1)
        if iterations < 1:
            raise ConfigurationError(
                violations=[f"Budget {budget} is too low for the engine."],
            )

        woa = woa.model_copy(update={"iterations": iterations})
        archive = ins_woa(scenario, deployment, woa)
    else:
        params = config.nsga2.model_copy(update={"seed": seed})
        archive = nsga2(scenario, deployment, params, budget=budget)

    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    export_archive(archive, deployment, out, engine.value)
    logger.info(
        "Archive of {} member(s) written to {}, using {} evaluations.",
        len(archive.members),
        out,
        archive.evaluations,
    )
    if not archive.any_feasible:
        raise InfeasibleRunError(archive)

    return 0


def _compare(args: Namespace, /) -> int:
    config = _config(args)
    overrides = {
        key: value
        for key, value in (
            ("users", args.users),
            ("seeds", args.seed),
            ("engines", args.engine),
            ("budget", args.budget),
        )
        if value is not None
    }
    if overrides:
        plan = config.experiment.model_validate(
            {**config.experiment.model_dump(), **overrides},
        )
        config = config.model_copy(update={"experiment": plan})

    results = asyncio.run(run_plan(config, out=args.out))
    logger.info("{} run(s) completed.", len(results))
    return 0


def _report(args: Namespace, /) -> int:
    directory = Path(args.directory)
    document = export_report(load_results(directory), directory)
    logger.info(
        "Report over {} series point(s) written to {}.",
        len(document.series),
        directory / "report.json",
    )
    return 0


def _parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="swarmcollect",
        description="Plan data collection missions of UAV swarms.",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Log debug messages.",
    )
    verbosity.add_argument(
        "-q",
        "--quiet",
        action="store_true",
        help="Only log warnings and errors.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="Generate a scenario.")
    generate.set_defaults(func=_generate)
    generate.add_argument("--config", help="TOML configuration file.")
    generate.add_argument("--users", type=int, help="Number of ground users.")
    generate.add_argument("--swarms", type=int, help="Number of swarms.")
    generate.add_argument("--tuavs", type=int, help="Number of T-UAVs.")
    generate.add_argument("--seed", type=int, help="Seed of the scenario.")
    generate.add_argument("--out", help="Scenario file to write.")

    deploy = commands.add_parser(
        "predeploy",
        help="Pre-deploy the swarms of a scenario.",
    )
    deploy.set_defaults(func=_predeploy)
    deploy.add_argument("scenario", help="Scenario file.")
    deploy.add_argument("--out", help="Deployment file to write.")

    optimize = commands.add_parser(
        "optimize",
        help="Optimise the missions of a scenario.",
    )
    optimize.set_defaults(func=_optimize)
    optimize.add_argument("scenario", help="Scenario file.")
    optimize.add_argument(
        "--deployment",
        help="Deployment file, computed from the scenario if absent.",
    )
    optimize.add_argument("--config", help="TOML configuration file.")
    optimize.add_argument(
        "--engine",
        choices=[e.value for e in Engine],
        default=Engine.INS_WOA.value,
        help="Optimisation engine.",
    )
    optimize.add_argument("--budget", type=int, help="Evaluation budget.")
    optimize.add_argument("--seed", type=int, help="Seed of the engine.")
    optimize.add_argument("--out", help="Directory to write results into.")

    compare = commands.add_parser(
        "compare",
        help="Compare engines over generated scenarios.",
    )
    compare.set_defaults(func=_compare)
    compare.add_argument("--config", help="TOML configuration file.")
    compare.add_argument(
        "--users",
        type=int,
        nargs="+",
        help="Numbers of ground users.",
    )
    compare.add_argument("--swarms", type=int, help="Number of swarms.")
    compare.add_argument("--tuavs", type=int, help="Number of T-UAVs.")
    compare.add_argument("--seed", type=int, nargs="+", help="Seeds.")
    compare.add_argument(
        "--engine",
        choices=[e.value for e in Engine],
        action="append",
        help="Engine to run, may be repeated.",
    )
    compare.add_argument("--budget", type=int, help="Evaluation budget.")
    compare.add_argument("--out", help="Directory to write results into.")

    summary = commands.add_parser(
        "report",
        help="Summarise the results of a comparison.",
    )
    summary.set_defaults(func=_report)
    summary.add_argument("directory", help="Directory of the results.")
    return parser


def main(argv: Sequence[str] | None = None, /) -> int:
    """Run the command-line interface.

    :param argv: Arguments, those of the process if None.
    :return: Exit code.
    """
    args = _parser().parse_args(argv)

    level = "DEBUG" if args.verbose else "WARNING" if args.quiet else "INFO"
    logger.remove()
    logger.add(sys.stderr, level=level)
    logger.enable("swarmcollect")

    try:
        return args.func(args)
    except InfeasibleRunError as exc:
        logger.error("{}", exc)
        return 2
    except (ConfigurationError, GeometryError, ScenarioDecodeError) as exc:
        logger.error("{}", exc)
        return 1
    except OSError as exc:
        logger.error("{}", exc)
        return 1
