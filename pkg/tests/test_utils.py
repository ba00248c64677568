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
"""Unit tests for the ``swarmcollect.utils`` module."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError
import pytest

from swarmcollect.geometry import Point2
from swarmcollect.utils import (
    as_point,
    as_points,
    find_missing_key,
    prune_unknown_keys,
    spawn_rng,
    validation_error_key,
)


class Inner(BaseModel):
    """Inner model for key tests."""

    model_config = ConfigDict(extra="forbid")

    alpha: float
    beta: float = 1.0


class Outer(BaseModel):
    """Outer model for key tests."""

    model_config = ConfigDict(extra="forbid")

    name: str
    inner: Inner
    items: list[Inner] = []


def test_spawn_rng_streams() -> None:
    """Test that streams only depend on the seed and keys."""
    first = spawn_rng(3, 0, 1).random(4)
    assert np.array_equal(first, spawn_rng(3, 0, 1).random(4))
    assert not np.array_equal(first, spawn_rng(3, 1, 0).random(4))
    assert not np.array_equal(first, spawn_rng(4, 0, 1).random(4))


def test_as_points() -> None:
    """Test that points are converted into arrays."""
    assert as_points([[1, 2], [3, 4]], dim=2).shape == (2, 2)
    assert as_points([], dim=3).shape == (0, 3)
    assert np.array_equal(
        as_points([Point2(x=1, y=2)], dim=2),
        np.array([[1.0, 2.0]]),
    )

    with pytest.raises(ValueError, match=r"dimension 3"):
        as_points([[1, 2]], dim=3)


def test_as_point() -> None:
    """Test that single points are converted into arrays."""
    assert np.array_equal(as_point(Point2(x=5, y=6)), [5.0, 6.0])
    assert np.array_equal(as_point((1, 2, 3)), [1.0, 2.0, 3.0])


def test_prune_unknown_keys() -> None:
    """Test that unknown keys are removed recursively."""
    data = {
        "name": "x",
        "extra": 5,
        "inner": {"alpha": 1.0, "gamma": 2.0},
        "items": [{"alpha": 2.0, "delta": 3}],
    }
    assert prune_unknown_keys(Outer, data) == {
        "name": "x",
        "inner": {"alpha": 1.0},
        "items": [{"alpha": 2.0}],
    }
    assert prune_unknown_keys(Outer, 5) == 5


@pytest.mark.parametrize(
    "data,key",
    (
        ({"name": "x", "inner": {"alpha": 1.0, "beta": 2.0}}, "items"),
        ({"inner": {}, "items": []}, "name"),
        ({"name": "x", "inner": {"beta": 1.0}, "items": []}, "inner.alpha"),
        (
            {
                "name": "x",
                "inner": {"alpha": 1.0, "beta": 1.0},
                "items": [{"alpha": 1.0, "beta": 1.0}, {"alpha": 2.0}],
            },
            "items.1.beta",
        ),
    ),
)
def test_find_missing_key(data: dict, key: str) -> None:
    """Test that the first missing key is found."""
    assert find_missing_key(Outer, data) == key


def test_find_no_missing_key() -> None:
    """Test that complete documents have no missing key."""
    data = {"name": "x", "inner": {"alpha": 1.0, "beta": 2.0}, "items": []}
    assert find_missing_key(Outer, data) is None


def test_validation_error_key() -> None:
    """Test that validation errors are located with dotted paths."""
    with pytest.raises(ValidationError) as exc_info:
        Outer.model_validate({"name": "x", "inner": {"alpha": "nope"}})

    assert validation_error_key(exc_info.value) == "inner.alpha"
