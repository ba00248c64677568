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
"""Configuration for swarmcollect's unit tests."""

from __future__ import annotations

import pytest

from swarmcollect.evaluator import MissionEvaluator
from swarmcollect.predeploy import Deployment, predeploy
from swarmcollect.scenario import Scenario, generate_scenario
from swarmcollect.woa import WoaParams


# Use the same event loop for all asyncio tests.
# For more details, consult the following page:
#   https://pytest-asyncio.readthedocs.io/en/latest/how-to-guides/
#   run_package_tests_in_same_loop.html
pytest.mark.asyncio(scope="package")


@pytest.fixture(scope="session")
def small_scenario() -> Scenario:
    """Get a scenario with 12 ground users, 2 swarms and 3 T-UAVs."""
    return generate_scenario(None, 12, 2, 3, 5, m_max=2, u_max=3)


@pytest.fixture(scope="session")
def small_deployment(small_scenario: Scenario) -> Deployment:
    """Get the deployment of the small scenario."""
    return predeploy(small_scenario)


@pytest.fixture
def small_evaluator(
    small_scenario: Scenario,
    small_deployment: Deployment,
) -> MissionEvaluator:
    """Get a fresh evaluator over the small scenario."""
    return MissionEvaluator(small_scenario, small_deployment)


@pytest.fixture(scope="session")
def tiny_woa() -> WoaParams:
    """Get whale engine parameters for quick runs."""
    return WoaParams(population=6, iterations=2, seed=3)
