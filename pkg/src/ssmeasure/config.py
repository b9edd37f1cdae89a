"""Load a custom iterated function system from a YAML file.

Example::

    name: skewed gasket
    maps:
      - ratio: 0.3
        translation: [0, 0]
      - ratio: 0.3
        rotation_deg: 90
        translation: [1, 0]
      - ratio: 0.25
        matrix: [[1, 0], [0, 1]]     # orthogonal part, row-major
        translation: [0.4, 0.6]
    known:                           # optional exact constants
      c: 0.1
      R: 1.2

Each map is ``x -> ratio * A x + translation``.  ``A`` is the identity
unless ``rotation_deg`` (two dimensions only) or ``matrix`` is given.
Errors name the line and field that caused them.
"""

from __future__ import annotations

import math

import numpy as np
import yaml

from .errors import ConfigError, MeasureError
from .ifs import IFSystem, KnownConstants, Similitude, build_system

_MAP_KEYS = {"ratio", "rotation_deg", "matrix", "translation"}


def _line(node):
    return node.start_mark.line + 1


def _mapping(node, field):
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("expected a mapping", _line(node), field)
    out = {}
    for key, value in node.value:
        if not isinstance(key, yaml.ScalarNode):
            raise ConfigError("keys must be plain names", _line(key), field)
        out[key.value] = (key, value)
    return out


def _number(node, field):
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError("expected a number", _line(node), field)
    try:
        value = float(node.value)
    except ValueError:
        raise ConfigError(f"expected a number, got {node.value!r}", _line(node), field) from None
    if not math.isfinite(value):
        raise ConfigError("number must be finite", _line(node), field)
    return value


def _vector(node, field):
    if not isinstance(node, yaml.SequenceNode) or not node.value:
        raise ConfigError("expected a non-empty list of numbers", _line(node), field)
    return [_number(v, field) for v in node.value]


def _matrix(node, field):
    if not isinstance(node, yaml.SequenceNode) or not node.value:
        raise ConfigError("expected a list of rows", _line(node), field)
    rows = [_vector(row, field) for row in node.value]
    if any(len(row) != len(rows) for row in rows):
        raise ConfigError("matrix must be square", _line(node), field)
    return np.array(rows)


def _parse_map(node, i):
    where = f"maps[{i}]"
    items = _mapping(node, where)
    for key, (knode, _) in items.items():
        if key not in _MAP_KEYS:
            raise ConfigError(f"unknown key {key!r}", _line(knode), f"{where}.{key}")
    for key in ("ratio", "translation"):
        if key not in items:
            raise ConfigError(f"missing {key!r}", _line(node), f"{where}.{key}")
    ratio = _number(items["ratio"][1], f"{where}.ratio")
    t = _vector(items["translation"][1], f"{where}.translation")
    if "rotation_deg" in items and "matrix" in items:
        raise ConfigError("give rotation_deg or matrix, not both", _line(node), where)
    if "rotation_deg" in items:
        rot_node = items["rotation_deg"][1]
        if len(t) != 2:
            raise ConfigError("rotation_deg needs a 2-D translation", _line(rot_node),
                              f"{where}.rotation_deg")
        a = math.radians(_number(rot_node, f"{where}.rotation_deg"))
        A = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        line, field = _line(rot_node), f"{where}.rotation_deg"
    elif "matrix" in items:
        mat_node = items["matrix"][1]
        A = _matrix(mat_node, f"{where}.matrix")
        line, field = _line(mat_node), f"{where}.matrix"
    else:
        A = np.eye(len(t))
        line, field = _line(node), where
    try:
        return Similitude(ratio, A, t)
    except MeasureError as exc:
        raise ConfigError(str(exc), line, field) from exc


def parse_config(text: str, source: str = "<config>") -> IFSystem:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"not valid YAML: {getattr(exc, 'problem', exc)}",
                          mark.line + 1 if mark else None) from exc
    if root is None:
        raise ConfigError("empty configuration")
    top = _mapping(root, "<root>")
    if "maps" not in top:
        raise ConfigError("missing 'maps'", _line(root), "maps")
    maps_node = top["maps"][1]
    if not isinstance(maps_node, yaml.SequenceNode):
        raise ConfigError("expected a list of maps", _line(maps_node), "maps")
    maps = [_parse_map(node, i) for i, node in enumerate(maps_node.value)]

    known = None
    if "known" in top:
        kn = _mapping(top["known"][1], "known")
        missing = {"c", "R"} - set(kn)
        if missing:
            raise ConfigError(f"missing {sorted(missing)}", _line(top["known"][1]), "known")
        known = KnownConstants(_number(kn["c"][1], "known.c"), _number(kn["R"][1], "known.R"))
    name = source
    if "name" in top:
        name = str(top["name"][1].value)
    try:
        return build_system(maps, known, name=name)
    except MeasureError as exc:
        raise ConfigError(str(exc), _line(maps_node), "maps") from exc


def load_config(path) -> IFSystem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, source=str(path))
