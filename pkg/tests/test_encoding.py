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
"""Unit tests for the ``swarmcollect.encoding`` module."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from swarmcollect.encoding import MissionLayout, nearest_neighbour_order
from swarmcollect.evaluator import MissionEvaluator
from swarmcollect.utils import spawn_rng


def test_nearest_neighbour_order() -> None:
    """Test that orders are completed greedily after their prefix."""
    points = np.array([[0.0, 10.0], [0.0, 1.0], [0.0, 5.0], [0.0, 20.0]])
    assert nearest_neighbour_order([0, 0], points) == [1, 2, 0, 3]
    assert nearest_neighbour_order([0, 0, 120], points, [3]) == [3, 0, 2, 1]
    assert nearest_neighbour_order([0, 0], points, [2, 1, 0, 3]) == [
        2,
        1,
        0,
        3,
    ]
    assert nearest_neighbour_order([0, 0], np.zeros((0, 2))) == []


def test_layout_sizes(small_evaluator: MissionEvaluator) -> None:
    """Test the number of genes with and without keys."""
    k = small_evaluator.num_candidates
    base = 3 * k + small_evaluator.num_gus + small_evaluator.num_tuavs
    assert MissionLayout(small_evaluator).size == base
    assert MissionLayout(small_evaluator, with_keys=True).size == base + k


def test_step_indexes_cover_the_vector(
    small_evaluator: MissionEvaluator,
) -> None:
    """Test that every gene is decided at some step."""
    layout = MissionLayout(small_evaluator)
    seen = np.concatenate(
        [
            layout.step_indexes(k)
            for k in range(small_evaluator.num_candidates)
        ],
    )
    assert sorted(set(seen.tolist())) == list(range(layout.size))

    first = layout.step_indexes(0)
    members = small_evaluator.candidate_members[0]
    assert len(first) == 3 + len(members) + 1
    assert first[:3].tolist() == [0, 1, 2]


def test_decode_ranges(small_evaluator: MissionEvaluator) -> None:
    """Test that decoded decisions are within their ranges."""
    scenario = small_evaluator.scenario
    layout = MissionLayout(small_evaluator, offset_radius=40.0)
    for x in layout.random(spawn_rng(2), 10):
        hover, _, gu_powers, relay_powers = layout.decode(
            x,
            [list(range(len(i))) for i in small_evaluator.candidate_index],
        )
        assert np.all(hover[:, 2] >= 30.0) and np.all(hover[:, 2] <= 100.0)
        offsets = np.abs(hover[:, :2] - small_evaluator.candidate_points)
        assert np.all(offsets <= 40.0 + 1e-9)
        assert np.all(hover[:, :2] >= 0) and np.all(hover[:, :2] <= 2000)
        assert np.all(gu_powers >= scenario.channel.p_u_min)
        assert np.all(gu_powers <= scenario.channel.p_u_max)
        assert np.all(relay_powers >= scenario.channel.p_m_min)
        assert np.all(relay_powers <= scenario.channel.p_m_max)


def test_decode_clips_genes(small_evaluator: MissionEvaluator) -> None:
    """Test that genes out of the unit range are clipped."""
    layout = MissionLayout(small_evaluator)
    orderings = [list(range(len(i))) for i in small_evaluator.candidate_index]
    high, _, _, _ = layout.decode(np.full(layout.size, 3.0), orderings)
    one, _, _, _ = layout.decode(np.ones(layout.size), orderings)
    assert np.array_equal(high, one)


def test_encode_default_solution(small_evaluator: MissionEvaluator) -> None:
    """Test that the default mission is recovered from its encoding."""
    layout = MissionLayout(small_evaluator, with_keys=True)
    solution = small_evaluator.default_solution()
    hover, orderings, gu_powers, relay_powers = small_evaluator.to_arrays(
        solution,
    )
    x = layout.encode(hover, gu_powers, relay_powers, orderings)

    assert np.all((x >= 0) & (x <= 1))
    assert layout.solution(x).orderings == solution.orderings
    decoded = layout.decode(x)
    assert np.allclose(decoded[0], hover)
    assert decoded[1] == orderings
    assert np.allclose(decoded[2], gu_powers)
    assert np.allclose(decoded[3], relay_powers)


def test_keys_define_orderings(small_evaluator: MissionEvaluator) -> None:
    """Test that candidates are visited in the order of their keys."""
    layout = MissionLayout(small_evaluator, with_keys=True)
    x = layout.random(spawn_rng(1), 1)[0]
    _, orderings, _, _ = layout.decode(x)

    for index, order in zip(small_evaluator.candidate_index, orderings):
        keys = x[layout.key_offset + np.array(index, dtype=np.int64)]
        assert sorted(order) == list(range(len(index)))
        assert np.all(np.diff(keys[order]) >= 0)

    with pytest.raises(ValueError, match=r"Orderings are required"):
        MissionLayout(small_evaluator).decode(x[: layout.key_offset])


def test_evaluate_many_keeps_order(small_evaluator: MissionEvaluator) -> None:
    """Test that concurrent evaluations are returned in order."""
    layout = MissionLayout(small_evaluator, with_keys=True)
    xs = layout.random(spawn_rng(6), 12)

    sequential = layout.evaluate_many(xs)
    with ThreadPoolExecutor(max_workers=3) as executor:
        concurrent = layout.evaluate_many(xs, executor=executor)

    assert sequential[0].shape == (12, 3)
    assert sequential[1].shape == (12,)
    assert np.array_equal(sequential[0], concurrent[0])
    assert np.array_equal(sequential[1], concurrent[1])
    assert small_evaluator.evaluations == 24

    objectives, violation = layout.evaluate(xs[4])
    assert np.array_equal(objectives, sequential[0][4])
    assert violation == sequential[1][4]
