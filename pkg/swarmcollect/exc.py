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
"""Error definitions."""

from __future__ import annotations

from collections.abc import Sequence
from typing import TYPE_CHECKING


if TYPE_CHECKING:
    from .moo import ParetoArchive


class Error(Exception):
    """An error has occurred in a swarmcollect function."""

    __slots__ = ()

    def __init__(self, message: str | None = None, /) -> None:
        super().__init__(message or "")


class ConfigurationError(Error, ValueError):
    """The provided parameters describe an invalid or infeasible setup."""

    __slots__ = ("violations",)

    violations: tuple[str, ...]
    """Violations that were found in the configuration."""

    def __init__(
        self,
        message: str | None = None,
        /,
        *,
        violations: Sequence[str] = (),
    ) -> None:
        self.violations = tuple(violations)
        if message is None:
            message = "Invalid configuration: " + "; ".join(self.violations)

        super().__init__(message)


class ScenarioDecodeError(Error, ValueError):
    """A persisted scenario, deployment or configuration could not be read."""

    __slots__ = ("key",)

    key: str
    """Dotted path of the offending key, e.g. ``channel.alpha``."""

    def __init__(self, message: str | None, /, *, key: str) -> None:
        message = message or "Invalid value."
        super().__init__(
            f"At key {key!r}: {message[0].lower()}{message[1:]}",
        )
        self.key = key


class GeometryError(Error, ValueError):
    """The input geometry is degenerate."""

    __slots__ = ()


class InfeasibleLinkError(Error, ValueError):
    """A link has a non-positive rate, hence an unbounded delay."""

    __slots__ = ("rate",)

    rate: float
    """Rate of the link, in bits per second."""

    def __init__(self, rate: float, /) -> None:
        super().__init__(f"Link rate must be positive, got {rate!r} bit/s")
        self.rate = rate


class InfeasibleRunError(Error):
    """An optimisation run did not produce any feasible mission.

    The archive is attached so that the caller may still export it.
    """

    __slots__ = ("archive",)

    archive: ParetoArchive
    """Archive obtained by the run, only containing infeasible members."""

    def __init__(self, archive: ParetoArchive, /) -> None:
        super().__init__(
            "No feasible mission was found; the lowest violation is "
            + f"{min(m.violation for m in archive.members):.6g}.",
        )
        self.archive = archive
