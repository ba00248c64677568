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
"""World model, physical parameters and scenario generation."""

from __future__ import annotations

from enum import StrEnum
from functools import cached_property
import math
from os import PathLike
from pathlib import Path
from typing import Annotated, Any, Self

from annotated_types import Ge, Gt, MinLen
from loguru import logger
import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    model_validator,
)
from pydantic_core import from_json
import toml

from .exc import ConfigurationError, ScenarioDecodeError
from .utils import find_missing_key, prune_unknown_keys, validation_error_key


__all__ = [
    "A2AMode",
    "AreaBounds",
    "ChannelParams",
    "EnergyParams",
    "EtaInterpretation",
    "FeasibilityNote",
    "GroundUser",
    "ParameterTable",
    "Point3",
    "Scenario",
    "VerticalPowerMode",
    "generate_scenario",
    "load_parameters",
    "load_scenario",
    "save_scenario",
    "validate_scenario",
]

PositiveFloat = Annotated[float, Gt(0)]


class Point3(BaseModel):
    """Point in the 3D coordinate system of the area, in meters."""

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    """Model configuration."""

    x: float
    """Abscissa."""

    y: float
    """Ordinate."""

    z: float
    """Altitude."""

    @classmethod
    def from_array(cls, value: npt.ArrayLike, /) -> Self:
        """Build a point out of an array of three coordinates.

        :param value: Coordinates.
        :return: Point.
        """
        x, y, z = np.asarray(value, dtype=np.float64)
        return cls(x=float(x), y=float(y), z=float(z))

    def as_array(self, /) -> npt.NDArray[np.float64]:
        """Get the coordinates as an array.

        :return: Array of shape ``(3,)``.
        """
        return np.array([self.x, self.y, self.z], dtype=np.float64)


class AreaBounds(BaseModel):
    """Bounds of the data collection area and flight ranges.

    Defaults describe a 2,000 m by 2,000 m area, with H-UAVs at 120 m and
    T-UAVs hovering between 30 m and 100 m.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    """Model configuration."""

    x_min: float = 0.0
    """Lower abscissa of the area."""

    x_max: float = 2000.0
    """Upper abscissa of the area."""

    y_min: float = 0.0
    """Lower ordinate of the area."""

    y_max: float = 2000.0
    """Upper ordinate of the area."""

    huav_altitude: PositiveFloat = 120.0
    """Altitude at which H-UAVs hover."""

    tuav_z_min: Annotated[float, Ge(0)] = 30.0
    """Lowest hovering altitude of T-UAVs."""

    tuav_z_max: PositiveFloat = 100.0
    """Highest hovering altitude of T-UAVs."""

    gu_z_min: Annotated[float, Ge(0)] = 0.0
    """Lowest terrain height of ground users."""

    gu_z_max: Annotated[float, Ge(0)] = 10.0
    """Highest terrain height of ground users."""

    @model_validator(mode="after")
    def _validate(self, /) -> Self:
        """Check that every range is ordered."""
        if self.x_min >= self.x_max:
            raise ValueError("x_min must be lower than x_max")
        if self.y_min >= self.y_max:
            raise ValueError("y_min must be lower than y_max")
        if self.tuav_z_min >= self.tuav_z_max:
            raise ValueError("tuav_z_min must be lower than tuav_z_max")
        if self.gu_z_min > self.gu_z_max:
            raise ValueError("gu_z_min must not exceed gu_z_max")

        return self

    @property
    def diagonal(self, /) -> float:
        """Length of the horizontal diagonal of the area, in meters."""
        return math.hypot(self.x_max - self.x_min, self.y_max - self.y_min)

    def contains_xy(self, x: float, y: float, /) -> bool:
        """Check whether a horizontal position is within the area.

        :param x: Abscissa.
        :param y: Ordinate.
        :return: Whether the position is within the area, borders included.
        """
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def clip_xy(
        self,
        points: npt.NDArray[np.float64],
        /,
    ) -> npt.NDArray[np.float64]:
        """Clip horizontal coordinates to the area.

        :param points: Array whose last axis starts with ``x, y``.
        :return: Copy of the array with clipped coordinates.
        """
        result = np.array(points, dtype=np.float64, copy=True)
        result[..., 0] = np.clip(result[..., 0], self.x_min, self.x_max)
        result[..., 1] = np.clip(result[..., 1], self.y_min, self.y_max)
        return result


class GroundUser(BaseModel):
    """Ground user, i.e. a stationary device with data to upload."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    id: Annotated[int, Ge(0)]
    """Index of the ground user in the scenario."""

    position: Point3
    """Position, with the terrain height as altitude."""

    data_size: PositiveFloat = 1e7
    """Size of the data to upload, in bits."""

    max_delay: PositiveFloat = 0.4
    """Maximum tolerated transmission delay, in seconds."""


class EtaInterpretation(StrEnum):
    """Interpretation of the mean additional losses of the G2A channel."""

    LINEAR = "linear"
    """Losses multiply the probabilities as they are."""

    DECIBEL = "decibel"
    """Losses are attenuations in dB, i.e. mapped to ``10^(-eta/10)``."""


class A2AMode(StrEnum):
    """Computation mode of the A2A relay rate."""

    LITERAL = "literal"
    """Rate does not depend on the T-UAV to H-UAV distance."""

    FREE_SPACE = "free_space"
    """Gain is additionally multiplied by the free space fading."""


class VerticalPowerMode(StrEnum):
    """Accounting of the vertical flight power over a leg."""

    LITERAL = "literal"
    """Vertical power applies over the whole leg duration."""

    SCALED = "scaled"
    """Vertical power is scaled by the vertical fraction of the leg."""


class ChannelParams(BaseModel):
    """Parameters of the G2A and A2A channels."""

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    """Model configuration."""

    alpha: PositiveFloat = 9.6
    """First S-curve parameter of the LoS probability."""

    beta: PositiveFloat = 0.28
    """Second S-curve parameter of the LoS probability."""

    carrier_freq: PositiveFloat = 2.4e9
    """Carrier frequency, in Hz."""

    light_speed: PositiveFloat = 3e8
    """Speed of light, in m/s."""

    eta_los: PositiveFloat = 0.1
    """Mean additional loss of LoS links."""

    eta_nlos: PositiveFloat = 20.0
    """Mean additional loss of NLoS links."""

    sigma2_dbm_hz: float = -174.0
    """Noise power spectral density, in dBm/Hz."""

    bw_g2a: PositiveFloat = 1.8e6
    """Bandwidth between a ground user and a T-UAV, in Hz."""

    bw_a2a: PositiveFloat = 5e6
    """Bandwidth between a T-UAV and its H-UAV, in Hz."""

    r_min_g2a: PositiveFloat = 2.5e7
    """Rate threshold of G2A links, in bits/s.

    The default is the rate needed to upload 10 Mb within 0.4 s.
    """

    r_min_a2a: PositiveFloat = 2.5e7
    """Rate threshold of A2A links, in bits/s."""

    p_u_min: PositiveFloat = 0.001
    """Minimum transmit power of ground users, in W."""

    p_u_max: PositiveFloat = 1.0
    """Maximum transmit power of ground users, in W."""

    p_m_min: PositiveFloat = 0.001
    """Minimum transmit power of T-UAVs, in W."""

    p_m_max: PositiveFloat = 5.0
    """Maximum transmit power of T-UAVs, in W."""

    eta_interpretation: EtaInterpretation = EtaInterpretation.LINEAR
    """How the mean additional losses are read."""

    a2a_mode: A2AMode = A2AMode.LITERAL
    """How the A2A relay rate is computed."""

    @model_validator(mode="after")
    def _validate(self, /) -> Self:
        """Check that the power ranges are ordered."""
        if self.p_u_min > self.p_u_max:
            raise ValueError("p_u_min must not exceed p_u_max")
        if self.p_m_min > self.p_m_max:
            raise ValueError("p_m_min must not exceed p_m_max")

        return self

    @property
    def noise_psd(self, /) -> float:
        """Noise power spectral density, in W/Hz."""
        return 10.0 ** ((self.sigma2_dbm_hz - 30.0) / 10.0)

    @property
    def eta_los_gain(self, /) -> float:
        """Multiplicative factor applied to LoS links."""
        if self.eta_interpretation == EtaInterpretation.DECIBEL:
            return 10.0 ** (-self.eta_los / 10.0)

        return self.eta_los

    @property
    def eta_nlos_gain(self, /) -> float:
        """Multiplicative factor applied to NLoS links."""
        if self.eta_interpretation == EtaInterpretation.DECIBEL:
            return 10.0 ** (-self.eta_nlos / 10.0)

        return self.eta_nlos


class EnergyParams(BaseModel):
    """Parameters of the rotary-wing propulsion model."""

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    """Model configuration."""

    p0: PositiveFloat = 99.66
    """Blade profile power in hovering status, in W."""

    p1: PositiveFloat = 120.16
    """Induced power in hovering status, in W."""

    u_tips: PositiveFloat = 120.0
    """Tip speed of the rotor blade, in m/s."""

    v0: PositiveFloat = 0.002
    """Mean rotor induced velocity in hovering status, in m/s."""

    d0: PositiveFloat = 0.48
    """Fuselage drag ratio."""

    rho0: PositiveFloat = 1.225
    """Air density, in kg/m³."""

    s0: PositiveFloat = 0.0001
    """Rotor solidity."""

    a0: PositiveFloat = 0.5
    """Rotor disc area, in m²."""

    mass: PositiveFloat = 4.25
    """Mass of a UAV, in kg."""

    gravity: PositiveFloat = 9.8
    """Gravitational acceleration, in m/s²."""

    v_xy: PositiveFloat = 15.0
    """Horizontal flight speed, in m/s."""

    v_z: PositiveFloat = 6.0
    """Vertical flight speed, in m/s."""

    vertical_power_mode: VerticalPowerMode = VerticalPowerMode.LITERAL
    """How the vertical power is accounted for over a leg."""


class Scenario(BaseModel):
    """Immutable description of the world to plan a mission in.

    Invariants that involve several fields, such as the feasibility of the
    T-UAV allocation, are not enforced at construction, but reported by
    :py:func:`validate_scenario`.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    bounds: AreaBounds = AreaBounds()
    """Area and flight ranges."""

    gus: Annotated[tuple[GroundUser, ...], MinLen(1)]
    """Ground users, the index of each being its identifier."""

    num_swarms: Annotated[int, Ge(1)] = 3
    """Number of UAV swarms, i.e. of H-UAVs."""

    num_tuavs: Annotated[int, Ge(1)] = 8
    """Total number of T-UAVs."""

    m_max: Annotated[int, Ge(1)] = 3
    """Maximum number of T-UAVs within a swarm."""

    u_max: Annotated[int, Ge(0)] = 6
    """Maximum number of ground users served at one hovering location."""

    channel: ChannelParams = ChannelParams()
    """Channel parameters."""

    energy: EnergyParams = EnergyParams()
    """Energy parameters."""

    seed: int = 0
    """Seed the scenario was generated with, reused by pre-deployment."""

    @cached_property
    def gu_positions(self, /) -> npt.NDArray[np.float64]:
        """Positions of the ground users, as a ``(U, 3)`` array."""
        positions = np.array(
            [gu.position.as_array() for gu in self.gus],
            dtype=np.float64,
        )
        positions.setflags(write=False)
        return positions


class FeasibilityNote(BaseModel):
    """Report of the invariant violations of a scenario."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    """Model configuration."""

    violations: tuple[str, ...] = ()
    """Human-readable violations, empty if the scenario is valid."""

    @property
    def valid(self, /) -> bool:
        """Whether the scenario is valid."""
        return not self.violations


def validate_scenario(scenario: Scenario, /) -> FeasibilityNote:
    """Report every invariant violation of a scenario.

    .. doctest::

        >>> validate_scenario(generate_scenario(num_gus=5, seed=1)).valid
        True

    :param scenario: Scenario to validate.
    :return: Report, with no violations if the scenario is valid.
    """
    violations: list[str] = []
    capacity = scenario.num_swarms * scenario.m_max
    if scenario.num_tuavs > capacity:
        violations.append(
            f"num_tuavs={scenario.num_tuavs} exceeds num_swarms * m_max "
            + f"= {capacity}",
        )
    if scenario.u_max < 1:
        violations.append(f"u_max={scenario.u_max} must be at least 1")
    if not scenario.gus:
        violations.append("at least one ground user is required")

    bounds = scenario.bounds
    for index, gu in enumerate(scenario.gus):
        if gu.id != index:
            violations.append(f"ground user at index {index} has id {gu.id}")

        position = gu.position
        if not bounds.contains_xy(position.x, position.y):
            violations.append(
                f"ground user {gu.id} at ({position.x}, {position.y}) is "
                + "outside of the area",
            )
        if position.z < 0 or position.z >= bounds.tuav_z_min:
            violations.append(
                f"ground user {gu.id} has a terrain height of {position.z} m, "
                + f"outside of [0, {bounds.tuav_z_min}[",
            )

    return FeasibilityNote(violations=tuple(violations))


def generate_scenario(
    bounds: AreaBounds | None = None,
    num_gus: int = 60,
    num_swarms: int = 3,
    num_tuavs: int = 8,
    seed: int = 0,
    /,
    *,
    m_max: int = 3,
    u_max: int = 6,
    channel: ChannelParams | None = None,
    energy: EnergyParams | None = None,
    data_size: float = 1e7,
    max_delay: float = 0.4,
    max_delay_range: tuple[float, float] | None = None,
) -> Scenario:
    """Generate a scenario with uniformly placed ground users.

    The ground users are placed uniformly in the area, with terrain heights
    drawn uniformly in the terrain band of the bounds.

    .. doctest::

        >>> scenario = generate_scenario(None, 60, 3, 8, 7)
        >>> len(scenario.gus), scenario == generate_scenario(None, 60, 3, 8, 7)
        (60, True)

    :param bounds: Area bounds, the defaults being used if None.
    :param num_gus: Number of ground users to place.
    :param num_swarms: Number of UAV swarms.
    :param num_tuavs: Total number of T-UAVs.
    :param seed: Seed of the generation.
    :param m_max: Maximum number of T-UAVs per swarm.
    :param u_max: Maximum number of ground users per hovering location.
    :param channel: Channel parameters, the defaults being used if None.
    :param energy: Energy parameters, the defaults being used if None.
    :param data_size: Data size of every ground user, in bits.
    :param max_delay: Maximum tolerated delay of every ground user, in s.
    :param max_delay_range: If provided, maximum tolerated delays are drawn
        uniformly in this range instead of using ``max_delay``.
    :return: Generated scenario.
    :raises ConfigurationError: The parameters are infeasible.
    """
    if bounds is None:
        bounds = AreaBounds()
    if num_gus < 1:
        raise ConfigurationError(
            violations=[f"num_gus={num_gus} must be at least 1"],
        )

    rng = np.random.default_rng(seed)
    xy = rng.uniform(
        (bounds.x_min, bounds.y_min),
        (bounds.x_max, bounds.y_max),
        size=(num_gus, 2),
    )
    z = rng.uniform(bounds.gu_z_min, bounds.gu_z_max, size=num_gus)
    if max_delay_range is not None:
        delays = rng.uniform(*max_delay_range, size=num_gus)
    else:
        delays = np.full(num_gus, max_delay)

    try:
        scenario = Scenario(
            bounds=bounds,
            gus=tuple(
                GroundUser(
                    id=i,
                    position=Point3(
                        x=float(xy[i, 0]),
                        y=float(xy[i, 1]),
                        z=float(z[i]),
                    ),
                    data_size=data_size,
                    max_delay=float(delays[i]),
                )
                for i in range(num_gus)
            ),
            num_swarms=num_swarms,
            num_tuavs=num_tuavs,
            m_max=m_max,
            u_max=u_max,
            channel=channel if channel is not None else ChannelParams(),
            energy=energy if energy is not None else EnergyParams(),
            seed=seed,
        )
    except ValidationError as exc:
        raise ConfigurationError(
            violations=[
                f"{validation_error_key(exc)}: {exc.errors()[0]['msg']}",
            ],
        ) from exc

    note = validate_scenario(scenario)
    if not note.valid:
        raise ConfigurationError(violations=note.violations)

    return scenario


def save_scenario(scenario: Scenario, path: str | PathLike[str], /) -> None:
    """Save a scenario as a JSON document.

    :param scenario: Scenario to save.
    :param path: Path of the file to write.
    """
    Path(path).write_text(scenario.model_dump_json(indent=2) + "\n")


def _decode_document(raw: bytes, /) -> Any:
    """Decode a JSON document.

    :param raw: Raw document.
    :return: Decoded document.
    :raises ScenarioDecodeError: The document is not valid JSON.
    """
    try:
        return from_json(raw)
    except ValueError as exc:
        raise ScenarioDecodeError(str(exc), key="<root>") from exc


def load_model(model: type[BaseModel], raw: bytes, /) -> Any:
    """Load a persisted model from a JSON document.

    Unknown keys are ignored with a warning, while missing keys are
    considered as errors.

    :param model: Model to load.
    :param raw: Raw JSON document.
    :return: Loaded model instance.
    :raises ScenarioDecodeError: The document is malformed.
    """
    data = prune_unknown_keys(model, _decode_document(raw))
    missing = find_missing_key(model, data)
    if missing is not None:
        raise ScenarioDecodeError("Missing required key.", key=missing)

    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ScenarioDecodeError(
            exc.errors()[0]["msg"],
            key=validation_error_key(exc),
        ) from exc


def load_scenario(path: str | PathLike[str], /) -> Scenario:
    """Load a scenario from a JSON document.

    :param path: Path of the file to read.
    :return: Loaded scenario.
    :raises ScenarioDecodeError: The file is malformed.
    """
    return load_model(Scenario, Path(path).read_bytes())


class ParameterTable(BaseModel):
    """Physical parameters, named after the usual parameter table.

    This is the ``[parameters]`` section of configuration files; values
    may be given either with the table names (e.g. ``f``, ``B_um``) or with
    the field names.
    """

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        populate_by_name=True,
    )
    """Model configuration."""

    alpha: PositiveFloat = 9.6
    beta: PositiveFloat = 0.28
    carrier_freq: Annotated[PositiveFloat, Field(alias="f")] = 2.4e9
    light_speed: Annotated[PositiveFloat, Field(alias="c")] = 3e8
    gravity: Annotated[PositiveFloat, Field(alias="g")] = 9.8
    data_size: Annotated[PositiveFloat, Field(alias="Q")] = 1e7
    p_u_min: Annotated[PositiveFloat, Field(alias="P_u_min")] = 0.001
    p_u_max: Annotated[PositiveFloat, Field(alias="P_u_max")] = 1.0
    p_m_min: Annotated[PositiveFloat, Field(alias="P_m_min")] = 0.001
    p_m_max: Annotated[PositiveFloat, Field(alias="P_m_max")] = 5.0
    max_delay: Annotated[PositiveFloat, Field(alias="T_u_max")] = 0.4
    bw_g2a: Annotated[PositiveFloat, Field(alias="B_um")] = 1.8e6
    bw_a2a: Annotated[PositiveFloat, Field(alias="B_ms")] = 5e6
    u_tips: Annotated[PositiveFloat, Field(alias="U_tips")] = 120.0
    mass: Annotated[PositiveFloat, Field(alias="W")] = 4.25
    a0: Annotated[PositiveFloat, Field(alias="A0")] = 0.5
    v0: PositiveFloat = 0.002
    p0: Annotated[PositiveFloat, Field(alias="P0")] = 99.66
    p1: Annotated[PositiveFloat, Field(alias="P1")] = 120.16
    rho0: PositiveFloat = 1.225
    d0: PositiveFloat = 0.48
    v_xy: PositiveFloat = 15.0
    v_z: PositiveFloat = 6.0
    s0: PositiveFloat = 0.0001
    sigma2_dbm_hz: float = -174.0
    eta_los: PositiveFloat = 0.1
    eta_nlos: PositiveFloat = 20.0
    r_min_g2a: Annotated[PositiveFloat | None, Field(alias="R_min_um")] = None
    r_min_a2a: Annotated[PositiveFloat | None, Field(alias="R_min_ms")] = None
    eta_interpretation: EtaInterpretation = EtaInterpretation.LINEAR
    a2a_mode: A2AMode = A2AMode.LITERAL
    vertical_power_mode: VerticalPowerMode = VerticalPowerMode.LITERAL

    def to_params(self, /) -> tuple[ChannelParams, EnergyParams]:
        """Get the channel and energy parameters out of the table.

        Rate thresholds default to the rate allowing to upload the data
        within the maximum tolerated delay.

        :return: Channel and energy parameters.
        """
        default_rate = self.data_size / self.max_delay
        channel = ChannelParams(
            alpha=self.alpha,
            beta=self.beta,
            carrier_freq=self.carrier_freq,
            light_speed=self.light_speed,
            eta_los=self.eta_los,
            eta_nlos=self.eta_nlos,
            sigma2_dbm_hz=self.sigma2_dbm_hz,
            bw_g2a=self.bw_g2a,
            bw_a2a=self.bw_a2a,
            r_min_g2a=(
                self.r_min_g2a if self.r_min_g2a is not None else default_rate
            ),
            r_min_a2a=(
                self.r_min_a2a if self.r_min_a2a is not None else default_rate
            ),
            p_u_min=self.p_u_min,
            p_u_max=self.p_u_max,
            p_m_min=self.p_m_min,
            p_m_max=self.p_m_max,
            eta_interpretation=self.eta_interpretation,
            a2a_mode=self.a2a_mode,
        )
        energy = EnergyParams(
            p0=self.p0,
            p1=self.p1,
            u_tips=self.u_tips,
            v0=self.v0,
            d0=self.d0,
            rho0=self.rho0,
            s0=self.s0,
            a0=self.a0,
            mass=self.mass,
            gravity=self.gravity,
            v_xy=self.v_xy,
            v_z=self.v_z,
            vertical_power_mode=self.vertical_power_mode,
        )
        return channel, energy


def read_toml(path: str | PathLike[str], /) -> dict[str, Any]:
    """Read a TOML configuration file.

    :param path: Path of the file to read.
    :return: Decoded document.
    :raises ScenarioDecodeError: The file is not valid TOML.
    """
    try:
        return toml.load(Path(path))
    except toml.TomlDecodeError as exc:
        raise ScenarioDecodeError(str(exc), key="<root>") from exc


def parse_section(
    model: type[BaseModel],
    raw: Any,
    /,
    *,
    section: str,
) -> Any:
    """Parse a configuration section into a model.

    :param model: Model of the section.
    :param raw: Raw section, as decoded from TOML.
    :param section: Name of the section, for messages.
    :return: Parsed section.
    :raises ScenarioDecodeError: The section is malformed.
    """
    data = prune_unknown_keys(
        model,
        raw if raw is not None else {},
        path=section,
    )
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ScenarioDecodeError(
            exc.errors()[0]["msg"],
            key=f"{section}.{validation_error_key(exc)}",
        ) from exc


def load_parameters(path: str | PathLike[str], /) -> ParameterTable:
    """Load the ``[parameters]`` section of a configuration file.

    :param path: Path of the TOML file to read.
    :return: Parameter table, with defaults for absent keys.
    :raises ScenarioDecodeError: The file is malformed.
    """
    document = read_toml(path)
    for key in document:
        if key != "parameters":
            logger.debug("Skipping section {!r} for parameters.", key)

    return parse_section(
        ParameterTable,
        document.get("parameters"),
        section="parameters",
    )
