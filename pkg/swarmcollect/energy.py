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
"""Propulsion power, energy and delay models.

T-UAVs alternate between hovering, while collecting data, and flying
between hovering positions along straight legs at constant speed. The
H-UAV of a swarm hovers at its site until the last of its T-UAVs is done.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
import math
from typing import Annotated, Any

from annotated_types import Ge
import numpy as np
from pydantic import BaseModel, ConfigDict

from .exc import InfeasibleLinkError
from .scenario import EnergyParams, VerticalPowerMode
from .utils import as_point


__all__ = [
    "EnergyBreakdown",
    "LegTiming",
    "PowerProfile",
    "a2a_delay",
    "flight_speed",
    "g2a_delay",
    "gu_energy",
    "horizontal_fly_power",
    "hover_duration",
    "hover_power",
    "huav_energy",
    "huav_mission_time",
    "leg_flight_time",
    "mission_time",
    "power_profile",
    "tuav_energy",
    "vertical_power",
]

NonNegativeFloat = Annotated[float, Ge(0)]


class PowerProfile(BaseModel):
    """Propulsion powers of a UAV at its nominal speeds."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    p_fly_horizontal: NonNegativeFloat
    """Power when flying horizontally at the nominal speed, in W."""

    p_hover: NonNegativeFloat
    """Power when hovering, in W."""

    p_vertical: NonNegativeFloat
    """Power when climbing at the nominal vertical speed, in W."""


class LegTiming(BaseModel):
    """Durations of a hovering position and of the leg flown to reach it."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    hover_duration: NonNegativeFloat
    """Duration of the hovering, in seconds."""

    flight_duration: NonNegativeFloat
    """Duration of the flight, in seconds."""


class EnergyBreakdown(BaseModel):
    """Energy consumed by a T-UAV over its mission, per component."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    relay: NonNegativeFloat = 0.0
    """Energy spent relaying data to the H-UAV, in J."""

    hover: NonNegativeFloat = 0.0
    """Energy spent hovering, in J."""

    flight: NonNegativeFloat = 0.0
    """Energy spent flying between hovering positions, in J."""

    @property
    def total(self, /) -> float:
        """Total energy, in J."""
        return self.relay + self.hover + self.flight


def horizontal_fly_power(v: Any, params: EnergyParams, /) -> Any:
    """Get the propulsion power of a rotary-wing UAV in level flight.

    The induced power term involves the difference of two close numbers at
    cruise speeds; it is computed as ``1 / (sqrt(1 + x²) + x)``, which is
    algebraically identical and does not suffer from cancellation.

    .. doctest::

        >>> from swarmcollect.scenario import EnergyParams
        >>> round(horizontal_fly_power(0.0, EnergyParams()), 2)
        219.82
        >>> round(horizontal_fly_power(15.0, EnergyParams()), 1)
        104.4

    :param v: Horizontal speed, in m/s.
    :param params: Energy parameters.
    :return: Power, in W.
    """
    v = np.asarray(v, dtype=np.float64)
    x = v**2 / (2 * params.v0**2)
    blade = params.p0 * (1 + 3 * v**2 / params.u_tips**2)
    induced = params.p1 * np.sqrt(1.0 / (np.sqrt(1 + x**2) + x))
    parasite = 0.5 * params.d0 * params.rho0 * params.s0 * params.a0 * v**3
    result = blade + induced + parasite
    if np.ndim(result) == 0:
        return float(result)

    return result


def hover_power(params: EnergyParams, /) -> float:
    """Get the propulsion power of a hovering UAV.

    :param params: Energy parameters.
    :return: Power, in W.
    """
    return params.p0 + params.p1


def vertical_power(v_z: Any, params: EnergyParams, /) -> Any:
    """Get the power needed to climb at a vertical speed.

    :param v_z: Magnitude of the vertical speed, in m/s.
    :param params: Energy parameters.
    :return: Power, in W.
    """
    result = params.mass * params.gravity * np.abs(np.asarray(v_z))
    if np.ndim(result) == 0:
        return float(result)

    return result


def flight_speed(params: EnergyParams, /) -> float:
    """Get the norm of the flight velocity.

    :param params: Energy parameters.
    :return: Speed, in m/s.
    """
    return math.hypot(params.v_xy, params.v_z)


def power_profile(params: EnergyParams, /) -> PowerProfile:
    """Get the propulsion powers at the nominal speeds.

    :param params: Energy parameters.
    :return: Power profile.
    """
    return PowerProfile(
        p_fly_horizontal=horizontal_fly_power(params.v_xy, params),
        p_hover=hover_power(params),
        p_vertical=vertical_power(params.v_z, params),
    )


def _transmission_delay(q_bits: Any, rate: Any, /) -> Any:
    rate = np.asarray(rate, dtype=np.float64)
    if np.any(rate <= 0):
        raise InfeasibleLinkError(float(np.min(rate)))

    result = np.asarray(q_bits, dtype=np.float64) / rate
    if np.ndim(result) == 0:
        return float(result)

    return result


def g2a_delay(q_bits: Any, rate: Any, /) -> Any:
    """Get the delay to upload data from a ground user to a T-UAV.

    :param q_bits: Size of the data, in bits.
    :param rate: Rate of the link, in bits/s.
    :return: Delay, in seconds.
    :raises InfeasibleLinkError: A rate is not positive.
    """
    return _transmission_delay(q_bits, rate)


def a2a_delay(q_bits: Any, rate: Any, /) -> Any:
    """Get the delay to relay data from a T-UAV to its H-UAV.

    :param q_bits: Size of the data, in bits.
    :param rate: Rate of the link, in bits/s.
    :return: Delay, in seconds.
    :raises InfeasibleLinkError: A rate is not positive.
    """
    return _transmission_delay(q_bits, rate)


def hover_duration(delays: Iterable[float], /) -> float:
    """Get the time a T-UAV hovers at a position.

    The T-UAV waits for the longest upload and relay of the ground users it
    serves at this position.

    :param delays: Sum of the upload and relay delays of every ground user
        served at the position, in seconds.
    :return: Hovering duration, in seconds.
    :raises ValueError: No ground user is served at the position.
    """
    values = list(delays)
    if not values:
        raise ValueError("A hovering position must serve a ground user.")

    return max(values)


def leg_flight_time(p: Any, q: Any, velocity: Any, /) -> float:
    """Get the time to fly between two positions in a straight line.

    :param p: Start position.
    :param q: End position.
    :param velocity: Speed, or components of the velocity, in m/s.
    :return: Flight time, in seconds.
    :raises ValueError: The speed is not positive.
    """
    speed = float(np.linalg.norm(np.atleast_1d(np.asarray(velocity))))
    if speed <= 0:
        raise ValueError("Flight speed must be positive.")

    return float(np.linalg.norm(as_point(q) - as_point(p))) / speed


def tuav_energy(
    trajectory: Sequence[Any],
    hover_durations: Sequence[float],
    relay_power: float,
    relay_delays: Sequence[float],
    params: EnergyParams,
    /,
) -> EnergyBreakdown:
    """Get the energy consumed by a T-UAV over its mission.

    In the literal vertical power mode, the vertical power is consumed over
    every leg in addition to the horizontal one. In the scaled mode, it is
    weighted by the share of the leg length covered vertically.

    :param trajectory: Swarm site, followed by the hovering positions in
        visiting order.
    :param hover_durations: Hovering duration at every hovering position,
        in seconds.
    :param relay_power: Transmit power of the T-UAV, in W.
    :param relay_delays: Relay delay of every ground user served, in
        seconds.
    :param params: Energy parameters.
    :return: Energy breakdown.
    :raises ValueError: The durations do not match the trajectory.
    """
    if len(hover_durations) != max(len(trajectory) - 1, 0):
        raise ValueError(
            f"Expected {max(len(trajectory) - 1, 0)} hovering durations, "
            + f"got {len(hover_durations)}.",
        )

    profile = power_profile(params)
    speed = flight_speed(params)
    points = [as_point(p) for p in trajectory]
    flight = 0.0
    for start, end in zip(points, points[1:]):
        length = float(np.linalg.norm(end - start))
        duration = length / speed
        if params.vertical_power_mode == VerticalPowerMode.SCALED:
            share = abs(float(end[2] - start[2])) / length if length else 0.0
            power = profile.p_fly_horizontal + profile.p_vertical * share
        else:
            power = profile.p_fly_horizontal + profile.p_vertical

        flight += power * duration

    return EnergyBreakdown(
        relay=relay_power * float(sum(relay_delays)),
        hover=profile.p_hover * float(sum(hover_durations)),
        flight=flight,
    )


def mission_time(legs: Iterable[LegTiming], /) -> float:
    """Get the duration of the mission of a T-UAV.

    :param legs: Timing of every leg.
    :return: Sum of the hovering and flight durations, in seconds.
    """
    return float(sum(leg.hover_duration + leg.flight_duration for leg in legs))


def huav_mission_time(members: Iterable[Iterable[LegTiming]], /) -> float:
    """Get the time an H-UAV hovers at its site.

    :param members: Legs of every T-UAV of the swarm.
    :return: Longest mission time of the swarm members, in seconds.
    :raises ValueError: The swarm has no T-UAV.
    """
    times = [mission_time(legs) for legs in members]
    if not times:
        raise ValueError("A swarm must have at least one T-UAV.")

    return max(times)


def huav_energy(t_s: float, params: EnergyParams, /) -> float:
    """Get the energy consumed by an H-UAV hovering for a duration.

    :param t_s: Hovering duration, in seconds.
    :param params: Energy parameters.
    :return: Energy, in J.
    """
    return hover_power(params) * t_s


def gu_energy(p_u: Any, delay: Any, /) -> Any:
    """Get the energy a ground user spends uploading its data.

    :param p_u: Transmit power, in W.
    :param delay: Upload delay, in seconds.
    :return: Energy, in J.
    """
    result = np.asarray(p_u, dtype=np.float64) * np.asarray(delay)
    if np.ndim(result) == 0:
        return float(result)

    return result
