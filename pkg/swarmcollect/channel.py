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
"""Ground-to-air and air-to-air channel models.

Every function accepts either scalars or numpy arrays, in which case the
computation is done element-wise with broadcasting; positions are given as
arrays whose last axis holds the ``x, y, z`` coordinates.
"""

from __future__ import annotations

from typing import Annotated, Any

from annotated_types import Ge, Gt, Le
import numpy as np
from pydantic import BaseModel, ConfigDict

from .exc import GeometryError
from .geometry import distance, elevation_angle_deg
from .scenario import A2AMode, ChannelParams


__all__ = [
    "LinkBudget",
    "a2a_rate",
    "check_thresholds",
    "free_space_gain",
    "g2a_gain",
    "g2a_rate",
    "link_budget",
    "los_probability",
    "small_scale_gain",
]


def _result(value: Any, /) -> Any:
    """Get a float out of 0-dimensional results."""
    if np.ndim(value) == 0:
        return float(value)

    return value


class LinkBudget(BaseModel):
    """Budget of a ground-to-air link."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    los_prob: Annotated[float, Ge(0), Le(1)]
    """Probability of a line of sight between both ends."""

    gain: Annotated[float, Gt(0)]
    """Channel gain, combining small-scale and free space fading."""

    rate: Annotated[float, Ge(0)]
    """Shannon rate of the link, in bits/s."""

    meets_threshold: bool
    """Whether the rate reaches the minimum G2A rate."""


def los_probability(theta_deg: Any, params: ChannelParams, /) -> Any:
    """Get the probability of a line of sight at an elevation angle.

    .. doctest::

        >>> from swarmcollect.scenario import ChannelParams
        >>> round(los_probability(9.6, ChannelParams()), 6)
        0.09434

    :param theta_deg: Elevation angle, in degrees.
    :param params: Channel parameters.
    :return: Probability.
    """
    theta = np.asarray(theta_deg, dtype=np.float64)
    return _result(
        1.0
        / (
            1.0
            + params.alpha * np.exp(-params.beta * (theta - params.alpha))
        ),
    )


def small_scale_gain(theta_deg: Any, params: ChannelParams, /) -> Any:
    """Get the small-scale fading of a link at an elevation angle.

    This is the average of the LoS and NLoS losses, weighted by the
    probability of each case.

    :param theta_deg: Elevation angle, in degrees.
    :param params: Channel parameters.
    :return: Small-scale fading.
    """
    los = np.asarray(los_probability(theta_deg, params))
    return _result(
        los * params.eta_los_gain + (1.0 - los) * params.eta_nlos_gain,
    )


def free_space_gain(dist: Any, params: ChannelParams, /) -> Any:
    """Get the free space fading over a distance.

    :param dist: Distance, in meters.
    :param params: Channel parameters.
    :return: Free space fading.
    :raises GeometryError: A distance is not positive.
    """
    dist = np.asarray(dist, dtype=np.float64)
    if np.any(dist <= 0):
        raise GeometryError("Link ends must not coincide.")

    return _result(
        (params.light_speed / (4 * np.pi * params.carrier_freq * dist)) ** 2,
    )


def g2a_gain(gu: Any, uav: Any, params: ChannelParams, /) -> Any:
    """Get the channel gain between a ground user and a UAV.

    :param gu: Position or positions of the ground user.
    :param uav: Position or positions of the UAV.
    :param params: Channel parameters.
    :return: Channel gain.
    :raises GeometryError: The ground user and the UAV coincide.
    """
    theta = elevation_angle_deg(gu, uav)
    return _result(
        np.asarray(small_scale_gain(theta, params))
        * np.asarray(free_space_gain(distance(gu, uav), params)),
    )


def _shannon_rate(
    gain: Any,
    power: Any,
    bandwidth: float,
    params: ChannelParams,
    /,
) -> Any:
    snr = np.asarray(gain) * np.asarray(power) / (bandwidth * params.noise_psd)
    return bandwidth * np.log1p(snr) / np.log(2.0)


def g2a_rate(gu: Any, uav: Any, p_u: Any, params: ChannelParams, /) -> Any:
    """Get the rate of a link between a ground user and a UAV.

    :param gu: Position or positions of the ground user.
    :param uav: Position or positions of the UAV.
    :param p_u: Transmit power of the ground user, in W.
    :param params: Channel parameters.
    :return: Rate, in bits/s.
    """
    return _result(
        _shannon_rate(g2a_gain(gu, uav, params), p_u, params.bw_g2a, params),
    )


def a2a_rate(
    p_m: Any,
    params: ChannelParams,
    /,
    *,
    dist: Any = None,
) -> Any:
    """Get the rate of the relay link between a T-UAV and its H-UAV.

    In the literal mode, the rate does not depend on the distance between
    both UAVs. In the free space mode, the gain is multiplied by the free
    space fading over ``dist``.

    .. doctest::

        >>> from swarmcollect.scenario import ChannelParams
        >>> f"{a2a_rate(5.0, ChannelParams()):.3e}"
        '2.226e+08'

    :param p_m: Transmit power of the T-UAV, in W.
    :param params: Channel parameters.
    :param dist: Distance between both UAVs, in meters; required in the free
        space mode.
    :return: Rate, in bits/s.
    :raises ValueError: The distance is missing in the free space mode.
    """
    gain: Any = params.eta_los_gain
    if params.a2a_mode == A2AMode.FREE_SPACE:
        if dist is None:
            raise ValueError("Free space A2A rates require a distance.")

        gain = gain * np.asarray(free_space_gain(dist, params))

    return _result(_shannon_rate(gain, p_m, params.bw_a2a, params))


def check_thresholds(
    g2a_rates: Any,
    a2a_rates: Any,
    params: ChannelParams,
    /,
) -> Any:
    """Check whether links reach their minimum rates.

    :param g2a_rates: Rates of the links from ground users, in bits/s.
    :param a2a_rates: Rates of the corresponding relay links, in bits/s.
    :param params: Channel parameters.
    :return: Whether both rates of every link reach their thresholds.
    """
    result = (np.asarray(g2a_rates) >= params.r_min_g2a) & (
        np.asarray(a2a_rates) >= params.r_min_a2a
    )
    if np.ndim(result) == 0:
        return bool(result)

    return result


def link_budget(
    gu: Any,
    uav: Any,
    p_u: float,
    params: ChannelParams,
    /,
) -> LinkBudget:
    """Get the budget of a single ground-to-air link.

    :param gu: Position of the ground user.
    :param uav: Position of the UAV.
    :param p_u: Transmit power of the ground user, in W.
    :param params: Channel parameters.
    :return: Link budget.
    """
    rate = float(g2a_rate(gu, uav, p_u, params))
    return LinkBudget(
        los_prob=float(los_probability(elevation_angle_deg(gu, uav), params)),
        gain=float(g2a_gain(gu, uav, params)),
        rate=rate,
        meets_threshold=rate >= params.r_min_g2a,
    )
