"""Level-k point clouds ``A_k`` with their code words and discrete masses.

``A_1`` holds the fixed points of the maps and ``A_k`` is the union of the
images ``f_i(A_{k-1})``.  Points are stored in lexicographic order of their
code words, so the array index of a point *is* its code written in base m
(first letter most significant).  The point with code ``i_1 ... i_k`` is
``f_{i_1} o ... o f_{i_{k-1}}`` applied to the fixed point of ``f_{i_k}`` and
lies in the cylinder ``E_{i_1 ... i_k}``.

Masses are kept twice: as floats (``weights``) and as exact integer units
(``units``) with ``mass = units / denominator``.  Summing integer units makes
every ball mass independent of summation order, which the parallel search
and the brute-force reference both rely on.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityExceeded, PrefixTooLong, SingularMap

DEFAULT_BUDGET = 2_000_000
MAX_LEVEL = 40
UNIT_SCALE = float(2 ** 62)


@dataclass(frozen=True)
class CodedPoint:
    coords: np.ndarray
    code: tuple
    weight: float


@dataclass(frozen=True, eq=False)
class PointCloud:
    level: int
    m: int
    coords: np.ndarray
    weights: np.ndarray
    units: np.ndarray
    denominator: float

    def __len__(self):
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def code(self, index: int) -> tuple:
        """Code word of point ``index`` as a tuple of letters in ``1..m``."""
        letters = []
        for _ in range(self.level):
            index, digit = divmod(int(index), self.m)
            letters.append(digit + 1)
        return tuple(reversed(letters))

    def index_of(self, code: Sequence[int]) -> int:
        if len(code) != self.level:
            raise ValueError(f"code has length {len(code)}, cloud level is {self.level}")
        index = 0
        for letter in code:
            index = index * self.m + (int(letter) - 1)
        return index

    def first_letters(self) -> np.ndarray:
        """Zero-based first letter of every point (its first-level cylinder)."""
        return np.arange(len(self), dtype=np.int64) // self.m ** (self.level - 1)

    def point(self, index: int) -> CodedPoint:
        return CodedPoint(self.coords[index].copy(), self.code(index), float(self.weights[index]))

    def __iter__(self):
        return (self.point(i) for i in range(len(self)))

    def mass(self, units) -> float:
        return float(units) / self.denominator

    def total_mass(self) -> float:
        return self.mass(int(self.units.sum()))


def _letter_masses(system):
    """Per-map float weights and integer units for one letter."""
    s = system.s
    if system.equal_ratios:
        return np.full(system.m, 1.0 / system.m), np.ones(system.m, dtype=np.int64), float(system.m)
    w = system.ratios ** s
    return w, None, UNIT_SCALE


def _units_from_weights(weights, denominator):
    return np.rint(weights * denominator).astype(np.int64)


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def fixed_point_coords(system) -> np.ndarray:
    pts = []
    for f in system.maps:
        try:
            pts.append(f.fixed_point())
        except np.linalg.LinAlgError as exc:  # pragma: no cover - impossible for ratio < 1
            raise SingularMap(str(exc)) from exc
    return np.vstack(pts)


def fixed_points(system) -> PointCloud:
    """Level-1 cloud: the fixed point of each map, with weight ``r_i^s``."""
    coords = np.ascontiguousarray(fixed_point_coords(system))
    weights, units, denom = _letter_masses(system)
    weights = weights.copy()
    if units is None:
        units = _units_from_weights(weights, denom)
    _freeze(coords, weights, units)
    return PointCloud(1, system.m, coords, weights, units, denom)


def extend_cloud(system, cloud: PointCloud, budget: int = DEFAULT_BUDGET) -> PointCloud:
    """Level ``k`` cloud from level ``k-1``: code ``(i, w)`` sits at ``f_i(x_w)``."""
    level = cloud.level + 1
    size = system.m ** level
    if level > MAX_LEVEL or size > budget:
        raise CapacityExceeded(
            f"level {level} needs {size} points, budget is {budget}", level=level)
    coords = np.ascontiguousarray(np.concatenate([f(cloud.coords) for f in system.maps]))
    letter_w, letter_u, denom = _letter_masses(system)
    weights = np.concatenate([w * cloud.weights for w in letter_w])
    if letter_u is not None:
        denom = cloud.denominator * system.m
        units = np.ones(size, dtype=np.int64)
    else:
        units = _units_from_weights(weights, denom)
    _freeze(coords, weights, units)
    return PointCloud(level, system.m, coords, weights, units, denom)


def build_cloud(system, level: int, budget: int = DEFAULT_BUDGET) -> PointCloud:
    if level < 1:
        raise ValueError("level must be >= 1")
    if system.m ** level > budget or level > MAX_LEVEL:
        raise CapacityExceeded(
            f"level {level} needs {system.m ** level} points, budget is {budget}", level=level)
    cloud = fixed_points(system)
    for _ in range(level - 1):
        cloud = extend_cloud(system, cloud, budget)
    return cloud


def mass_of_code_prefix(cloud: PointCloud, prefix: Sequence[int]) -> float:
    """Total weight of the points whose code starts with ``prefix`` (letters ``1..m``)."""
    q = len(prefix)
    if q > cloud.level:
        raise PrefixTooLong(f"prefix of length {q} exceeds cloud level {cloud.level}")
    start = 0
    for letter in prefix:
        if not 1 <= int(letter) <= cloud.m:
            raise ValueError(f"letter {letter} outside 1..{cloud.m}")
        start = start * cloud.m + (int(letter) - 1)
    block = cloud.m ** (cloud.level - q)
    start *= block
    return cloud.mass(int(cloud.units[start:start + block].sum()))


def render_code(code: Sequence[int]) -> str:
    if all(letter < 10 for letter in code):
        return "".join(str(letter) for letter in code)
    return ".".join(str(letter) for letter in code)


def to_csv(cloud: PointCloud, out=None) -> str:
    """Dump ``code, x_1..x_n, weight`` rows; returns the text when ``out`` is None."""
    buf = io.StringIO() if out is None else out
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["code"] + [f"x{j + 1}" for j in range(cloud.dim)] + ["weight"])
    for i in range(len(cloud)):
        writer.writerow([render_code(cloud.code(i))]
                        + [repr(float(v)) for v in cloud.coords[i]]
                        + [repr(float(cloud.weights[i]))])
    if out is None:
        return buf.getvalue()
    return ""
