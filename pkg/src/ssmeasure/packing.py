"""Packing measure estimates ``M_k`` with their certified error bounds.

``M_k`` is the largest density ratio ``(2d)^s / mu_k(B(x, d))`` over centers
``x`` of the level-k cloud and radii ``d`` in the window
``[c - 2R r^k - 2R r^(k+1), c / r_min]`` (``r = r_max``), where ``B`` is the
open ball.  The open ball always contains the center's own atom, so its mass
never vanishes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from . import _search
from .cloud import DEFAULT_BUDGET, PointCloud, build_cloud, extend_cloud
from .errors import CapacityExceeded, NoAdmissible, WindowInfeasible
from .ifs import IFSystem, window_feasible
from .neighbors import DEFAULT_TIE_TOL, build_index

PACKING = "packing"
CENTERED = "centered"

CHUNK = 64
NBINS = 1024


@dataclass(frozen=True)
class ErrorBoundInputs:
    q_k: int
    Q: float
    window_lo: float
    window_hi: float


@dataclass(frozen=True, eq=False)
class MeasureEstimate:
    kind: str
    level: int
    value: float
    s: float
    witness_center: np.ndarray
    witness_center_code: tuple
    witness_partner: np.ndarray
    witness_partner_code: tuple
    witness_radius: float
    witness_mass: float
    epsilon: float
    bound: object
    elapsed: float = 0.0
    center_index: int = -1
    partner_index: int = -1
    centers_evaluated: int = 0
    system_name: str = field(default="", compare=False)

    @property
    def interval(self) -> tuple:
        return (self.value - self.epsilon, self.value + self.epsilon)

    def recompute(self) -> float:
        """Density ratio rebuilt from the stored witness radius and mass."""
        return (2.0 * self.witness_radius) ** self.s / self.witness_mass

    def same_result(self, other: "MeasureEstimate") -> bool:
        """Bitwise equality of everything except timing and bookkeeping."""
        return (self.kind == other.kind and self.level == other.level
                and self.value == other.value and self.epsilon == other.epsilon
                and self.witness_radius == other.witness_radius
                and self.witness_mass == other.witness_mass
                and self.center_index == other.center_index
                and self.partner_index == other.partner_index)


def packing_error_bound(system: IFSystem, k: int):
    """``(epsilon_k, ErrorBoundInputs)`` using the smallest c and the largest R."""
    C = system.constants
    if not window_feasible(system, k):
        raise WindowInfeasible(f"radius window is degenerate at k={k} for {system.name}")
    s, r = C.s, C.r_max
    lo = C.c_lo - 2.0 * C.R_hi * r ** k - 2.0 * C.R_hi * r ** (k + 1)
    hi = C.c_hi / C.r_min
    p, q = C.R_hi, 0
    while p > lo:
        p *= r
        q += 1
    Q = hi ** (s - 1.0) if s >= 1.0 else lo ** (s - 1.0)
    eps = s * 2.0 ** (s + 1.0) * C.R_hi * Q / C.r_min ** (s * q) * r ** k
    return eps, ErrorBoundInputs(q, Q, lo, hi)


def _chain_width(n_points: int, dmax: float, tie_tol: float) -> float:
    # widest possible tie group: every link may add tie_tol * max(1, d)
    return n_points * tie_tol * max(1.0, dmax) * (1.0 + 1e-9)


def _bins(span: float, chain: float, nbins: int) -> int:
    while nbins > 4 and chain >= span / nbins / 4.0:
        nbins //= 2
    return nbins


def _witness(kind, system, cloud, bound, eps, center, partner, radius, units, t0, evaluated):
    mass = cloud.mass(units)
    value = (2.0 * radius) ** system.s / mass
    return MeasureEstimate(
        kind=kind, level=cloud.level, value=value, s=system.s,
        witness_center=cloud.coords[center].copy(), witness_center_code=cloud.code(center),
        witness_partner=cloud.coords[partner].copy(), witness_partner_code=cloud.code(partner),
        witness_radius=float(radius), witness_mass=mass, epsilon=eps, bound=bound,
        elapsed=time.perf_counter() - t0, center_index=int(center), partner_index=int(partner),
        centers_evaluated=int(evaluated), system_name=system.name)


def _cloud_for(system, k, cloud, budget):
    if cloud is not None:
        if cloud.level != k:
            raise ValueError(f"cloud is level {cloud.level}, asked for k={k}")
        return cloud
    return build_cloud(system, k, budget)


def estimate_packing(system: IFSystem, k: int, cloud: Optional[PointCloud] = None,
                     budget: int = DEFAULT_BUDGET,
                     tie_tol: float = DEFAULT_TIE_TOL) -> MeasureEstimate:
    """Largest windowed open-ball density ratio on ``A_k``.

    Ties in the maximum go to the smallest center index and then the smallest
    partner index, which is the lexicographic order of the code words.  Two
    centers tie when their ratios agree to a relative ``1e-12``; mirror-image
    centers otherwise differ by a few ulps of rounding noise.
    """
    t0 = time.perf_counter()
    eps, bound = packing_error_bound(system, k)
    cloud = _cloud_for(system, k, cloud, budget)
    lo, hi = bound.window_lo, bound.window_hi
    index = build_index(cloud, hi)
    chain = _chain_width(len(cloud), hi, tie_tol)
    nbins = _bins(hi - lo, chain, NBINS)
    s, denom = system.s, cloud.denominator
    grid = (index.order, index.cell_start, index.origin, index.shape, index.cell_size)

    ub = _search.packing_bounds(cloud.coords, cloud.units, *grid, lo, hi, s, denom, nbins, chain)
    visit = np.argsort(-ub, kind="stable").astype(np.int64)
    h, rep, units, partner, done = _search.packing_search(
        visit, ub, CHUNK, cloud.coords, cloud.units, *grid, lo, hi, s, denom, tie_tol, chain)
    if not np.any(h >= 0):
        raise NoAdmissible(f"no radius in [{lo}, {hi}] at k={k}")  # pragma: no cover
    c = _search.pick(h, done, maximize=True)
    return _witness(PACKING, system, cloud, bound, eps, c, int(partner[c]), rep[c],
                    int(units[c]), t0, done.sum())


def levels(system: IFSystem, ks: Sequence[int], budget: int = DEFAULT_BUDGET) -> Iterator:
    """Yield ``(k, cloud)`` for increasing ``ks``, extending one level at a time."""
    cloud = None
    for k in sorted(ks):
        if system.m ** k > budget:
            raise CapacityExceeded(f"level {k} needs {system.m ** k} points, budget is {budget}",
                                   level=k)
        if cloud is None or cloud.level > k:
            cloud = build_cloud(system, k, budget)
        while cloud.level < k:
            cloud = extend_cloud(system, cloud, budget)
        yield k, cloud


def run_packing(system: IFSystem, k_min: int, k_max: int, budget: int = DEFAULT_BUDGET,
                skip_infeasible: bool = True) -> list:
    """Estimates for every feasible ``k`` in ``k_min..k_max``."""
    out = []
    if not skip_infeasible:
        for k in range(k_min, k_max + 1):
            if not window_feasible(system, k):
                raise WindowInfeasible(f"radius window is degenerate at k={k}")
    ks = [k for k in range(k_min, k_max + 1) if window_feasible(system, k)]
    for k, cloud in levels(system, ks, budget):
        out.append(estimate_packing(system, k, cloud))
    return out


def detect_stabilization(values: Iterable, ks: Optional[Sequence[int]] = None,
                         decimals: int = 14) -> Optional[int]:
    """First level from which every later value agrees after rounding.

    ``values`` may be floats or estimates; ``ks`` defaults to the estimates'
    levels (or ``1, 2, ...`` for bare floats).  Returns None when the last two
    values differ.
    """
    values = list(values)
    if len(values) < 2:
        raise ValueError("need at least two values")
    if ks is None:
        ks = [v.level if isinstance(v, MeasureEstimate) else i + 1 for i, v in enumerate(values)]
    nums = [round(v.value if isinstance(v, MeasureEstimate) else float(v), decimals) for v in values]
    if nums[-1] != nums[-2]:
        return None
    i = len(nums) - 1
    while i > 0 and nums[i - 1] == nums[-1]:
        i -= 1
    return int(ks[i])


__all__ = ["ErrorBoundInputs", "MeasureEstimate", "PACKING", "CENTERED", "packing_error_bound",
           "estimate_packing", "run_packing", "detect_stabilization", "levels"]
