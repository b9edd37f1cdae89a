"""Brute-force reference estimators for small clouds.

Every center is compared with every cloud point, the distances are sorted,
grouped and scanned in full.  Nothing here uses the spatial index, the
bounds or the chunked search, so agreement with the fast path is meaningful.
The arithmetic (distance accumulation, integer masses, ``pow``) is kept
identical so agreement is expected to the last bit.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .chausdorff import centered_error_bound
from .cloud import build_cloud
from .errors import NoAdmissible, TooLarge
from .ifs import IFSystem
from .neighbors import DEFAULT_TIE_TOL
from .packing import CENTERED, PACKING, MeasureEstimate, packing_error_bound

MAX_POINTS = 10_000
RATIO_TIE = 1e-12


def _check_size(system, k):
    n = system.m ** k
    if n > MAX_POINTS:
        raise TooLarge(f"m^k = {n} exceeds the brute-force cap of {MAX_POINTS}")


def _sorted_groups(coords, units, first, x_index, tie_tol):
    """Yield ``(dist, units_before, group_units, min_partner, has_cross)`` per group."""
    x = coords[x_index]
    diff = coords - x
    d2 = diff[:, 0] * diff[:, 0]
    for j in range(1, coords.shape[1]):
        d2 = d2 + diff[:, j] * diff[:, j]
    d = np.sqrt(d2)
    order = np.argsort(d, kind="stable")
    ds = d[order].tolist()
    us = units[order].tolist()
    ids = order.tolist()
    own = first[x_index]
    before = 0
    i, n = 0, len(ds)
    while i < n:
        j = i + 1
        while j < n and ds[j] - ds[j - 1] <= tie_tol * max(1.0, ds[j]):
            j += 1
        members = ids[i:j]
        gu = sum(us[i:j])
        yield ds[i], before, gu, min(members), any(first[p] != own for p in members)
        before += gu
        i = j


def _result(kind, system, cloud, bound, eps, center, partner, radius, units, t0):
    mass = cloud.mass(units)
    return MeasureEstimate(
        kind=kind, level=cloud.level, value=math.pow(2.0 * radius, system.s) / mass, s=system.s,
        witness_center=cloud.coords[center].copy(), witness_center_code=cloud.code(center),
        witness_partner=cloud.coords[partner].copy(), witness_partner_code=cloud.code(partner),
        witness_radius=float(radius), witness_mass=mass, epsilon=eps, bound=bound,
        elapsed=time.perf_counter() - t0, center_index=center, partner_index=partner,
        centers_evaluated=len(cloud), system_name=system.name)


def _choose(per_center, maximize):
    """Smallest center whose ratio ties the optimum to a relative 1e-12."""
    hs = [row[0] for row in per_center]
    best = max(hs) if maximize else min(hs)
    for c, row in enumerate(per_center):
        if (row[0] >= best * (1.0 - RATIO_TIE)) if maximize else (row[0] <= best * (1.0 + RATIO_TIE)):
            return c, row
    raise NoAdmissible("no candidate")  # pragma: no cover


def brute_packing(system: IFSystem, k: int, tie_tol: float = DEFAULT_TIE_TOL) -> MeasureEstimate:
    """Largest windowed open-ball ratio by exhaustive search (``m^k <= 10^4``)."""
    _check_size(system, k)
    t0 = time.perf_counter()
    eps, bound = packing_error_bound(system, k)
    cloud = build_cloud(system, k)
    first = cloud.first_letters()
    s, denom = system.s, cloud.denominator
    per_center = []
    for x in range(len(cloud)):
        best = (-1.0, -1, 0.0, 0)
        for dist, before, _, partner, _ in _sorted_groups(cloud.coords, cloud.units, first, x, tie_tol):
            if bound.window_lo <= dist <= bound.window_hi:
                h = math.pow(2.0 * dist, s) / (before / denom)
                if h > best[0] or (h == best[0] and partner < best[1]):
                    best = (h, partner, dist, before)
        per_center.append(best)
    c, (h, partner, dist, units) = _choose(per_center, maximize=True)
    if h < 0:
        raise NoAdmissible(f"no radius inside the window at k={k}")  # pragma: no cover
    return _result(PACKING, system, cloud, bound, eps, c, partner, dist, units, t0)


def brute_centered(system: IFSystem, k: int, tie_tol: float = DEFAULT_TIE_TOL) -> MeasureEstimate:
    """Smallest admissible closed-ball ratio by exhaustive search (``m^k <= 10^4``)."""
    _check_size(system, k)
    t0 = time.perf_counter()
    eps, bound = centered_error_bound(system, k)
    cloud = build_cloud(system, k)
    first = cloud.first_letters()
    s, denom = system.s, cloud.denominator
    per_center = []
    for x in range(len(cloud)):
        best = (math.inf, -1, 0.0, 0)
        admissible = False
        for dist, before, gu, partner, cross in _sorted_groups(cloud.coords, cloud.units, first, x, tie_tol):
            admissible = admissible or cross
            if admissible:
                h = math.pow(2.0 * dist, s) / ((before + gu) / denom)
                if h < best[0] or (h == best[0] and partner < best[1]):
                    best = (h, partner, dist, before + gu)
        per_center.append(best)
    c, (h, partner, dist, units) = _choose(per_center, maximize=False)
    return _result(CENTERED, system, cloud, bound, eps, c, partner, dist, units, t0)


__all__ = ["brute_packing", "brute_centered", "MAX_POINTS"]
