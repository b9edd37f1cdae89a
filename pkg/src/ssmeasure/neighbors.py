"""Uniform-grid spatial index and tie-grouped ranked distance lists.

The index is a compressed bucket layout: points are sorted by their flat
cell number, ``order`` lists point indices cell by cell and ``cell_start``
gives each cell's slice.  The same arrays feed the compiled search kernels,
which pad the grid to three dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cloud import PointCloud

DEFAULT_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpatialIndex:
    cell_size: float
    origin: np.ndarray      # lower corner of the bounding box
    upper: np.ndarray       # upper corner
    shape: np.ndarray       # cells per axis, padded to length 3
    cell_start: np.ndarray  # CSR offsets, length prod(shape) + 1
    order: np.ndarray       # point indices grouped by cell
    dim: int

    @property
    def bounds(self):
        return self.origin[:self.dim].copy(), self.upper.copy()

    def cell_of(self, x):
        """Lattice cell of ``x``, keyed like :attr:`buckets`."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.floor((x - self.origin[:self.dim]) / self.cell_size).astype(np.int64)
        idx = np.clip(idx, 0, self.shape[:self.dim] - 1)
        cell = tuple(int(i) for i in idx)
        return cell[0] if self.dim == 1 else cell

    def _flat(self, cell) -> int:
        full = list(np.atleast_1d(cell)) + [0] * (3 - np.size(cell))
        return (full[0] * int(self.shape[1]) + full[1]) * int(self.shape[2]) + full[2]

    def bucket(self, cell) -> list:
        f = self._flat(cell)
        return [int(i) for i in self.order[self.cell_start[f]:self.cell_start[f + 1]]]

    @cached_property
    def buckets(self) -> dict:
        """Nonempty buckets keyed by lattice cell (a plain int in one dimension)."""
        out = {}
        sizes = np.diff(self.cell_start)
        for f in np.flatnonzero(sizes):
            i2 = f % self.shape[2]
            i1 = (f // self.shape[2]) % self.shape[1]
            i0 = f // (self.shape[1] * self.shape[2])
            cell = (int(i0), int(i1), int(i2))[:self.dim]
            key = cell[0] if self.dim == 1 else cell
            out[key] = sorted(int(i) for i in self.order[self.cell_start[f]:self.cell_start[f + 1]])
        return out


def build_index(cloud: PointCloud, cell_size: float) -> SpatialIndex:
    cell_size = float(cell_size)
    if not cell_size > 0 or not math.isfinite(cell_size):
        raise ValueError(f"cell_size must be positive and finite, got {cell_size!r}")
    coords = cloud.coords
    n = coords.shape[1]
    if n > 3:
        raise ValueError("spatial index supports up to three dimensions")
    origin = coords.min(axis=0)
    upper = coords.max(axis=0)
    per_axis = np.maximum(1, np.ceil((upper - origin) / cell_size)).astype(np.int64)
    shape = np.ones(3, dtype=np.int64)
    shape[:n] = per_axis
    cells = np.floor((coords - origin) / cell_size).astype(np.int64)
    cells = np.clip(cells, 0, per_axis - 1)
    padded = np.zeros((len(coords), 3), dtype=np.int64)
    padded[:, :n] = cells
    flat = (padded[:, 0] * shape[1] + padded[:, 1]) * shape[2] + padded[:, 2]
    order = np.argsort(flat, kind="stable").astype(np.int64)
    counts = np.bincount(flat, minlength=int(shape.prod()))
    cell_start = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=cell_start[1:])
    origin3 = np.zeros(3)
    origin3[:n] = origin
    for a in (origin3, upper, shape, cell_start, order):
        a.setflags(write=False)
    return SpatialIndex(cell_size, origin3, upper, shape, cell_start, order, n)


@dataclass(frozen=True)
class DistanceRecord:
    partner_index: int
    dist: float
    partner_weight: float


@dataclass(frozen=True)
class TieGroup:
    """Partners at (numerically) one distance from the center."""
    dist: float             # smallest distance in the group
    weight: float
    units: int
    records: tuple

    @property
    def partner_index(self) -> int:
        """Smallest partner index, i.e. the lexicographically first code."""
        return min(r.partner_index for r in self.records)


def _candidates(index: SpatialIndex, cloud: PointCloud, center: int, d_hi: float):
    x = cloud.coords[center]
    lo = np.zeros(3, dtype=np.int64)
    hi = index.shape - 1
    n = index.dim
    if math.isfinite(d_hi):
        reach = d_hi + index.cell_size * 1e-9
        a = np.floor((x - reach - index.origin[:n]) / index.cell_size)
        b = np.floor((x + reach - index.origin[:n]) / index.cell_size)
        lo = lo.copy()
        hi = hi.copy()
        lo[:n] = np.clip(a, 0, index.shape[:n] - 1)
        hi[:n] = np.clip(b, 0, index.shape[:n] - 1)
    parts = []
    for i0 in range(lo[0], hi[0] + 1):
        for i1 in range(lo[1], hi[1] + 1):
            f0 = (i0 * index.shape[1] + i1) * index.shape[2]
            parts.append(index.order[index.cell_start[f0 + lo[2]]:index.cell_start[f0 + hi[2] + 1]])
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def ranked_distances(index: SpatialIndex, cloud: PointCloud, center_index: int,
                     d_lo: float, d_hi: float, tie_tol: float = DEFAULT_TIE_TOL,
                     include_center: bool = False) -> list:
    """Tie groups of partners with ``d_lo <= |x - y| <= d_hi``, nearest first.

    Consecutive sorted distances within ``tie_tol * max(1, d)`` of each other
    join one group.  The center itself is left out unless ``include_center``
    is set, in which case it forms the zero-distance group when ``d_lo == 0``.
    """
    if not 0 <= d_lo <= d_hi:
        raise ValueError(f"need 0 <= d_lo <= d_hi, got [{d_lo}, {d_hi}]")
    cand = _candidates(index, cloud, center_index, d_hi)
    diff = cloud.coords[cand] - cloud.coords[center_index]
    d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    keep = (d >= d_lo) & (d <= d_hi)
    if not include_center:
        keep &= cand != center_index
    cand, d = cand[keep], d[keep]
    o = np.lexsort((cand, d))
    cand, d = cand[o], d[o]

    groups = []
    i = 0
    while i < len(d):
        j = i + 1
        while j < len(d) and d[j] - d[j - 1] <= tie_tol * max(1.0, d[j]):
            j += 1
        members = cand[i:j]
        recs = tuple(DistanceRecord(int(p), float(dd), float(cloud.weights[p]))
                     for p, dd in zip(members, d[i:j]))
        groups.append(TieGroup(float(d[i]), float(cloud.weights[members].sum()),
                               int(cloud.units[members].sum()), recs))
        i = j
    return groups


def cumulative_mass_below(ranked: list, j: int) -> float:
    """Weight of all groups strictly before group ``j`` (open-ball mass)."""
    if not 0 <= j < len(ranked):
        raise IndexError(f"group index {j} outside 0..{len(ranked) - 1}")
    return float(sum(g.weight for g in ranked[:j]))
