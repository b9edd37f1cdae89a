"""Centered Hausdorff measure estimates ``m_k``.

``m_k`` is the smallest ratio ``(2d)^s / mu_k(closed ball B(x, d))`` over
centers ``x`` of the level-k cloud and radii ``d = |x - y|`` admissible for
``x``: the closed ball must reach a point whose first code letter differs
from that of ``x``.  Once one such point is inside, every larger radius is
admissible too.

Radii with ``(2d)^s`` above the incumbent can never win because a ball holds
at most unit mass; the search uses this to cut every center's scan short.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _search
from .cloud import DEFAULT_BUDGET, PointCloud
from .errors import NoAdmissible
from .ifs import IFSystem
from .neighbors import DEFAULT_TIE_TOL, build_index
from .packing import (CENTERED, CHUNK, NBINS, MeasureEstimate, _bins, _chain_width,
                      _cloud_for, _witness, levels)


@dataclass(frozen=True)
class CenteredBoundInputs:
    q: int
    Qc: float


def centered_error_bound(system: IFSystem, k: int):
    """``(epsilon_k, CenteredBoundInputs)``; q does not depend on k."""
    C = system.constants
    s, r = C.s, C.r_max
    p, q = C.R_hi, 0
    while p > C.c_lo:
        p *= r
        q += 1
    Qc = C.R_hi ** (s - 1.0) if s >= 1.0 else C.c_lo ** (s - 1.0)
    eps = s * 2.0 ** (s + 1.0) * C.R_hi * Qc / C.r_min ** (q * s) * r ** k
    return eps, CenteredBoundInputs(q, Qc)


def first_admissible_index(ranked: list, cloud: PointCloud, center_index: int) -> int:
    """Index of the first tie group holding a partner from another basic cylinder.

    ``ranked`` is the full list of groups for the center, as returned by
    :func:`ssmeasure.neighbors.ranked_distances`.
    """
    block = cloud.m ** (cloud.level - 1)
    own = center_index // block
    for j, group in enumerate(ranked):
        if any(rec.partner_index // block != own for rec in group.records):
            return j
    raise NoAdmissible(f"center {center_index} sees no other basic cylinder")


def estimate_centered(system: IFSystem, k: int, cloud: Optional[PointCloud] = None,
                      budget: int = DEFAULT_BUDGET,
                      tie_tol: float = DEFAULT_TIE_TOL) -> MeasureEstimate:
    """Smallest admissible closed-ball density ratio on ``A_k``.

    Tie-breaking follows :func:`ssmeasure.packing.estimate_packing`.
    """
    t0 = time.perf_counter()
    eps, bound = centered_error_bound(system, k)
    cloud = _cloud_for(system, k, cloud, budget)
    if cloud.level < 1 or system.m < 2:  # pragma: no cover - guarded by build_system
        raise NoAdmissible("need at least two basic cylinders")
    lo_corner, hi_corner = cloud.coords.min(axis=0), cloud.coords.max(axis=0)
    dmax = float(np.linalg.norm(hi_corner - lo_corner)) * (1.0 + 1e-12) + 1e-300
    # cells of an eighth of the diameter keep the shrinking radius scans local
    index = build_index(cloud, max(dmax / 8.0, 1e-12))
    chain = _chain_width(len(cloud), dmax, tie_tol)
    nbins = _bins(dmax, chain, NBINS)
    s, denom = system.s, cloud.denominator
    first = cloud.first_letters()
    grid = (index.order, index.cell_start, index.origin, index.shape, index.cell_size)

    lb = _search.centered_bounds(cloud.coords, cloud.units, first, dmax, s, denom, nbins, chain)
    visit = np.argsort(lb, kind="stable").astype(np.int64)
    h, rep, units, partner, done = _search.centered_search(
        visit, lb, CHUNK, cloud.coords, cloud.units, first, *grid, s, denom, tie_tol, chain)
    c = _search.pick(h, done, maximize=False)
    if partner[c] < 0:
        raise NoAdmissible(f"no admissible radius at k={k}")  # pragma: no cover
    return _witness(CENTERED, system, cloud, bound, eps, c, int(partner[c]), rep[c],
                    int(units[c]), t0, done.sum())


def run_centered(system: IFSystem, k_min: int, k_max: int, budget: int = DEFAULT_BUDGET) -> list:
    return [estimate_centered(system, k, cloud)
            for k, cloud in levels(system, range(k_min, k_max + 1), budget)]


__all__ = ["CenteredBoundInputs", "centered_error_bound", "first_admissible_index",
           "estimate_centered", "run_centered"]
