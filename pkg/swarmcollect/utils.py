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
"""Utilities for swarmcollect."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
import types
from typing import Any, Union, get_args, get_origin

from loguru import logger
import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ValidationError


def spawn_rng(seed: int, /, *keys: int) -> np.random.Generator:
    """Get a random generator for a stream derived from a seed and keys.

    Streams obtained with different keys are independent, and the same
    ``(seed, *keys)`` always yields the same stream, whatever the order in
    which streams are requested:

    .. doctest::

        >>> a = spawn_rng(7, 1, 2).random()
        >>> b = spawn_rng(7, 2, 1).random()
        >>> a == spawn_rng(7, 1, 2).random(), a == b
        (True, False)

    :param seed: Run seed.
    :param keys: Stream keys, e.g. agent and step indexes.
    :return: Random generator.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def as_points(points: Any, /, *, dim: int) -> npt.NDArray[np.float64]:
    """Convert points into a ``(n, dim)`` array.

    Points may be provided as an array, or as a sequence of objects having
    an ``as_array()`` method, e.g. :py:class:`swarmcollect.geometry.Point2`.

    :param points: Points to convert.
    :param dim: Expected dimension of every point.
    :return: Array of points.
    :raises ValueError: The points do not have the expected dimension.
    """
    if not isinstance(points, np.ndarray):
        points = [
            p.as_array() if hasattr(p, "as_array") else p for p in points
        ]

    array = np.asarray(points, dtype=np.float64)
    if array.ndim == 1 and array.size == 0:
        array = array.reshape(0, dim)
    if array.ndim != 2 or array.shape[1] != dim:
        raise ValueError(
            f"Expected points of dimension {dim}, got shape {array.shape}",
        )

    return array


def as_point(point: Any, /) -> npt.NDArray[np.float64]:
    """Convert a single point into an array.

    :param point: Point having an ``as_array()`` method, or array-like.
    :return: Array of coordinates.
    """
    if hasattr(point, "as_array"):
        return point.as_array()

    return np.asarray(point, dtype=np.float64)


def _model_types(annotation: Any, /) -> Iterable[type[BaseModel]]:
    """Get the model classes appearing in a field annotation.

    :param annotation: Field annotation.
    :return: Model classes, found recursively in unions and containers.
    """
    if isinstance(annotation, type) and issubclass(annotation, BaseModel):
        yield annotation
        return

    origin = get_origin(annotation)
    if origin is None:
        return

    if origin in (Union, types.UnionType, tuple, list, dict):
        for arg in get_args(annotation):
            yield from _model_types(arg)


def prune_unknown_keys(
    model: type[BaseModel],
    data: Any,
    /,
    *,
    path: str = "",
) -> Any:
    """Remove the keys the model does not know of, with a warning.

    This is used to read files produced by other versions, which may carry
    keys we do not know of.

    :param model: Model to compare the keys with.
    :param data: Raw data, as decoded from JSON or TOML.
    :param path: Dotted path of the data, for messages.
    :return: Data without the unknown keys.
    """
    if not isinstance(data, Mapping):
        return data

    known: dict[str, Any] = {}
    for name, field in model.model_fields.items():
        known[name] = field.annotation
        if field.alias is not None:
            known[field.alias] = field.annotation

    result: dict[str, Any] = {}
    for key, value in data.items():
        key_path = f"{path}.{key}" if path else str(key)
        if key not in known:
            logger.warning("Ignoring unknown key {!r}.", key_path)
            continue

        submodels = list(_model_types(known[key]))
        if len(submodels) == 1:
            value = _prune_nested(
                submodels[0],
                value,
                path=key_path,
                mapping=get_origin(known[key]) is dict,
            )

        result[key] = value

    return result


def _prune_nested(
    model: type[BaseModel],
    value: Any,
    /,
    *,
    path: str,
    mapping: bool,
) -> Any:
    """Prune unknown keys in a value that contains models.

    :param model: Model contained in the value.
    :param value: Value, being a model, or a container of models.
    :param path: Dotted path of the value, for messages.
    :param mapping: Whether the value is a mapping of models.
    :return: Pruned value.
    """
    if isinstance(value, list):
        return [
            _prune_nested(model, item, path=f"{path}.{i}", mapping=False)
            for i, item in enumerate(value)
        ]

    if mapping and isinstance(value, Mapping):
        return {
            k: prune_unknown_keys(model, v, path=f"{path}.{k}")
            for k, v in value.items()
        }

    return prune_unknown_keys(model, value, path=path)


def find_missing_key(
    model: type[BaseModel],
    data: Any,
    /,
    *,
    path: str = "",
) -> str | None:
    """Find the first model field absent from the data, recursively.

    Persisted documents are written with every field, so a document with
    a missing key is considered malformed, even when the field has a default
    value in the model.

    :param model: Model to compare the keys with.
    :param data: Raw data, as decoded from JSON.
    :param path: Dotted path of the data, for messages.
    :return: Dotted path of the first missing key, or None.
    """
    if not isinstance(data, Mapping):
        return None

    for name, field in model.model_fields.items():
        key_path = f"{path}.{name}" if path else name
        aliased = field.alias is not None and field.alias in data
        if name not in data and not aliased:
            return key_path

        value = data.get(name, data.get(field.alias or name))
        submodels = list(_model_types(field.annotation))
        if len(submodels) != 1:
            continue

        items: Iterable[tuple[str, Any]]
        if isinstance(value, list):
            items = _flatten_items(value, key_path)
        elif isinstance(value, Mapping) and get_origin(
            field.annotation,
        ) is dict:
            items = ((f"{key_path}.{k}", v) for k, v in value.items())
        else:
            items = ((key_path, value),)

        for item_path, item in items:
            missing = find_missing_key(submodels[0], item, path=item_path)
            if missing is not None:
                return missing

    return None


def _flatten_items(value: list, path: str, /) -> Iterable[tuple[str, Any]]:
    """Flatten nested lists, yielding items with their dotted paths.

    :param value: Nested lists.
    :param path: Dotted path of the value.
    :return: Items with their dotted paths.
    """
    for i, item in enumerate(value):
        if isinstance(item, list):
            yield from _flatten_items(item, f"{path}.{i}")
        else:
            yield f"{path}.{i}", item


def validation_error_key(exc: ValidationError, /) -> str:
    """Get the dotted path of the first error in a validation error.

    .. doctest::

        >>> from pydantic import BaseModel
        >>> class Inner(BaseModel):
        ...     alpha: float
        ...
        >>> class Outer(BaseModel):
        ...     channel: Inner
        ...
        >>> try:
        ...     Outer.model_validate({"channel": {}})
        ... except ValidationError as exc:
        ...     print(validation_error_key(exc))
        channel.alpha

    :param exc: Validation error raised by pydantic.
    :return: Dotted path, or ``"<root>"`` if the error is on the whole data.
    """
    errors = exc.errors()
    if not errors or not errors[0]["loc"]:
        return "<root>"

    return ".".join(str(part) for part in errors[0]["loc"])
