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
"""Unit tests for the ``swarmcollect.cli`` module."""

from __future__ import annotations

from pathlib import Path

import pandas as pd
import pytest

from swarmcollect.cli import main
from swarmcollect.predeploy import load_deployment
from swarmcollect.scenario import load_scenario


TINY_CONFIG = """\
[swarms]
num_swarms = 2
num_tuavs = 3
m_max = 2
u_max = 3

[woa]
population = 4
iterations = 1

[nsga2]
population = 4
"""


@pytest.fixture
def config_path(tmp_path: Path) -> Path:
    """Get a configuration file for quick runs."""
    path = tmp_path / "swarmcollect.toml"
    path.write_text(TINY_CONFIG)
    return path


@pytest.fixture
def scenario_path(tmp_path: Path, config_path: Path) -> Path:
    """Get a scenario file with 12 ground users."""
    path = tmp_path / "scenario.json"
    code = main(
        [
            "-q",
            "generate",
            "--config",
            str(config_path),
            "--users",
            "12",
            "--seed",
            "5",
            "--out",
            str(path),
        ],
    )
    assert code == 0
    return path


def test_generate(scenario_path: Path) -> None:
    """Test that the generated scenario follows the options."""
    scenario = load_scenario(scenario_path)
    assert len(scenario.gus) == 12
    assert scenario.num_tuavs == 3
    assert scenario.seed == 5


def test_generate_overrides(tmp_path: Path) -> None:
    """Test that sizing options override the defaults."""
    path = tmp_path / "other.json"
    code = main(
        [
            "generate",
            "--users",
            "10",
            "--swarms",
            "1",
            "--tuavs",
            "2",
            "--out",
            str(path),
        ],
    )
    assert code == 0
    scenario = load_scenario(path)
    assert (scenario.num_swarms, scenario.num_tuavs) == (1, 2)
    assert scenario.seed == 0


def test_generate_infeasible(tmp_path: Path) -> None:
    """Test that infeasible sizing yields a configuration error."""
    path = tmp_path / "scenario.json"
    code = main(
        [
            "generate",
            "--swarms",
            "1",
            "--tuavs",
            "9",
            "--out",
            str(path),
        ],
    )
    assert code == 1
    assert not path.exists()


def test_predeploy(tmp_path: Path, scenario_path: Path) -> None:
    """Test that deployments are written."""
    out = tmp_path / "deployment.json"
    assert main(["predeploy", str(scenario_path), "--out", str(out)]) == 0
    assert load_deployment(out).num_tuavs == 3


@pytest.mark.parametrize("engine", ("ins-woa", "nsga2"))
def test_optimize(
    tmp_path: Path,
    config_path: Path,
    scenario_path: Path,
    engine: str,
) -> None:
    """Test that optimisations write their archive."""
    out = tmp_path / "results"
    code = main(
        [
            "optimize",
            str(scenario_path),
            "--config",
            str(config_path),
            "--engine",
            engine,
            "--out",
            str(out),
        ],
    )
    assert code in (0, 2)
    frame = pd.read_csv(out / f"archive-{engine}.csv")
    assert "violation" in frame.columns
    assert (out / f"archive-{engine}.json").exists()


def test_optimize_budget_too_low(
    tmp_path: Path,
    config_path: Path,
    scenario_path: Path,
) -> None:
    """Test that a budget below one iteration is refused."""
    code = main(
        [
            "optimize",
            str(scenario_path),
            "--config",
            str(config_path),
            "--budget",
            "3",
            "--out",
            str(tmp_path / "results"),
        ],
    )
    assert code == 1
    assert not (tmp_path / "results").exists()


def test_compare_and_report(tmp_path: Path, config_path: Path) -> None:
    """Test an experiment, then its report from the written files."""
    out = tmp_path / "results"
    code = main(
        [
            "compare",
            "--config",
            str(config_path),
            "--users",
            "12",
            "--seed",
            "5",
            "--engine",
            "ins-woa",
            "--out",
            str(out),
        ],
    )
    assert code in (0, 2)
    summary = pd.read_csv(out / "summary.csv")
    assert list(summary["engine"]) == ["ins-woa"]
    assert list(summary["users"]) == [12]

    (out / "report.json").unlink()
    assert main(["report", str(out)]) == 0
    assert (out / "report.json").exists()


@pytest.mark.parametrize(
    "content",
    (None, b"{not json", b'{"gus": []}'),
)
def test_bad_scenario(tmp_path: Path, content: bytes | None) -> None:
    """Test that missing or malformed scenarios yield an input error."""
    path = tmp_path / "scenario.json"
    if content is not None:
        path.write_bytes(content)

    assert main(["predeploy", str(path)]) == 1


def test_bad_config(tmp_path: Path) -> None:
    """Test that malformed configuration files yield an input error."""
    path = tmp_path / "swarmcollect.toml"
    path.write_text("[woa\n")
    assert main(["generate", "--config", str(path)]) == 1
