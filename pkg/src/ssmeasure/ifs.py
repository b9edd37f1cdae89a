"""Systems of contracting similitudes and the geometric constants they induce.

A system ``f_1, ..., f_m`` of similitudes of R^n with the strong separation
condition determines the constants every estimator needs: the similarity
dimension ``s``, the extreme ratios ``r_min``/``r_max``, the minimum gap ``c``
between distinct first-level cylinders and the diameter ``R`` of the
attractor.  Generic systems get certified brackets for ``c`` and ``R``; the
three built-in families carry their exact values.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NotOrthogonal,
    NotSeparated,
    RatioOutOfRange,
    TolNotReached,
    TooFewMaps,
)

ORTHO_TOL = 1e-12
DEFAULT_TOL = 1e-10
DEFAULT_DEPTH = 60


@dataclass(frozen=True, eq=False)
class Similitude:
    """The map ``x -> ratio * orthogonal @ x + translation``."""

    ratio: float
    orthogonal: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        ratio = float(self.ratio)
        if not 0.0 < ratio < 1.0:
            raise RatioOutOfRange(f"ratio must lie in (0, 1), got {ratio!r}")
        t = np.atleast_1d(np.asarray(self.translation, dtype=float)).copy()
        if t.ndim != 1:
            raise DimensionMismatch("translation must be a vector")
        if np.size(self.orthogonal) != t.size ** 2:
            raise DimensionMismatch(
                f"orthogonal part has {np.size(self.orthogonal)} entries, "
                f"expected {t.size ** 2} for dimension {t.size}")
        o = np.asarray(self.orthogonal, dtype=float).reshape(t.size, t.size)
        if np.max(np.abs(o.T @ o - np.eye(t.size))) > ORTHO_TOL:
            raise NotOrthogonal("orthogonal part fails O^T O = I within 1e-12")
        o = o.copy()
        o.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "ratio", ratio)
        object.__setattr__(self, "orthogonal", o)
        object.__setattr__(self, "translation", t)

    @classmethod
    def scaling(cls, ratio, translation):
        t = np.atleast_1d(np.asarray(translation, dtype=float))
        return cls(ratio, np.eye(t.size), t)

    @property
    def dim(self) -> int:
        return self.translation.size

    @property
    def linear(self) -> np.ndarray:
        return self.ratio * self.orthogonal

    def __call__(self, x):
        """Apply to one point (shape ``(n,)``) or a stack of points (``(N, n)``)."""
        x = np.asarray(x, dtype=float)
        return x @ self.linear.T + self.translation

    def fixed_point(self) -> np.ndarray:
        return np.linalg.solve(np.eye(self.dim) - self.linear, self.translation)


@dataclass(frozen=True)
class KnownConstants:
    c: float
    R: float


@dataclass(frozen=True)
class DerivedConstants:
    s: float
    r_min: float
    r_max: float
    c_lo: float
    c_hi: float
    R_lo: float
    R_hi: float

    @property
    def exact(self) -> bool:
        return self.c_lo == self.c_hi and self.R_lo == self.R_hi


@dataclass(frozen=True, eq=False)
class IFSystem:
    maps: tuple
    ambient_dim: int
    known_constants: Optional[KnownConstants] = None
    name: str = "custom"
    family: Optional[str] = None
    r: Optional[float] = None
    _constants: Optional[DerivedConstants] = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return len(self.maps)

    @cached_property
    def ratios(self) -> np.ndarray:
        return np.array([f.ratio for f in self.maps])

    @property
    def equal_ratios(self) -> bool:
        return bool(np.all(self.ratios == self.ratios[0]))

    @cached_property
    def s(self) -> float:
        return similarity_dimension(self)

    @cached_property
    def constants(self) -> DerivedConstants:
        if self._constants is not None:
            return self._constants
        return derive_constants(self)

    def with_constants(self, constants: DerivedConstants) -> "IFSystem":
        """Copy of this system whose derived constants are pinned to ``constants``."""
        return IFSystem(self.maps, self.ambient_dim, self.known_constants,
                        self.name, self.family, self.r, constants)

    def describe(self) -> str:
        return self.name


def build_system(maps: Sequence[Similitude], known_constants=None, name="custom",
                 family=None, r=None) -> IFSystem:
    maps = tuple(maps)
    if len(maps) < 2:
        raise TooFewMaps(f"a system needs m >= 2 maps, got {len(maps)}")
    dims = {f.dim for f in maps}
    if len(dims) != 1:
        raise DimensionMismatch(f"maps act on different dimensions: {sorted(dims)}")
    if known_constants is not None and not isinstance(known_constants, KnownConstants):
        known_constants = KnownConstants(*known_constants)
    return IFSystem(maps, dims.pop(), known_constants, name, family, r)


# -- built-in families -------------------------------------------------------

def _check_family_ratio(r):
    r = float(r)
    if not 0.0 < r < 0.5:
        raise RatioOutOfRange(f"family ratio must lie in (0, 1/2), got {r!r}")
    return r


def cantor(r: float) -> IFSystem:
    """Central Cantor set C_r: ``x -> r x`` and ``x -> r x + 1 - r``."""
    r = _check_family_ratio(r)
    maps = [Similitude.scaling(r, [0.0]), Similitude.scaling(r, [1.0 - r])]
    return build_system(maps, KnownConstants(1.0 - 2.0 * r, 1.0),
                        name=f"cantor(r={r!r})", family="cantor", r=r)


def sierpinski(r: float) -> IFSystem:
    """Sierpinski gasket S_r with vertices (0,0), (1,0), (1/2, sqrt(3)/2)."""
    r = _check_family_ratio(r)
    top = (1.0 - r) * np.array([0.5, math.sqrt(3.0) / 2.0])
    maps = [Similitude.scaling(r, [0.0, 0.0]),
            Similitude.scaling(r, [1.0 - r, 0.0]),
            Similitude.scaling(r, top)]
    return build_system(maps, KnownConstants(1.0 - 2.0 * r, 1.0),
                        name=f"sierpinski(r={r!r})", family="sierpinski", r=r)


def planar_cantor(r: float) -> IFSystem:
    """Planar Cantor set K_r: four corner maps of the unit square."""
    r = _check_family_ratio(r)
    a = 1.0 - r
    maps = [Similitude.scaling(r, b) for b in ([0.0, 0.0], [a, 0.0], [a, a], [0.0, a])]
    return build_system(maps, KnownConstants(1.0 - 2.0 * r, math.sqrt(2.0)),
                        name=f"planar(r={r!r})", family="planar", r=r)


FAMILIES = {"cantor": cantor, "sierpinski": sierpinski, "planar": planar_cantor}


def family(name: str, r: float) -> IFSystem:
    return FAMILIES[name](r)


# -- constants ---------------------------------------------------------------

def _ratio_sum(ratios, s):
    return float(np.sum(ratios ** s))


def similarity_dimension(system) -> float:
    """Unique ``s`` with ``sum(r_i ** s) == 1``.

    Equal ratios use the closed form ``log m / log(1/r)``.  Otherwise the root
    is bracketed and bisected, then polished with Newton steps.
    """
    ratios = system.ratios if isinstance(system, IFSystem) else np.asarray(system, float)
    if np.all(ratios == ratios[0]):
        return math.log(ratios.size) / math.log(1.0 / ratios[0])
    lo, hi = 0.0, float(getattr(system, "ambient_dim", 1) + 1)
    while _ratio_sum(ratios, hi) > 1.0:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _ratio_sum(ratios, mid) > 1.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    logs = np.log(ratios)
    for _ in range(3):
        g = _ratio_sum(ratios, s) - 1.0
        dg = float(np.sum(ratios ** s * logs))
        step = g / dg
        if not math.isfinite(step):
            break
        s -= step
    return s


def _hull_vertices(points: np.ndarray) -> np.ndarray:
    if points.shape[1] == 1:
        return np.array([[points.min()], [points.max()]])
    pts = np.unique(points, axis=0)
    if len(pts) <= points.shape[1] + 1:
        return pts
    from scipy.spatial import ConvexHull, QhullError
    try:
        return pts[ConvexHull(pts).vertices]
    except QhullError:
        # flat point set: fall back to the extreme points along each axis pair
        return pts


def _max_pairwise(points: np.ndarray) -> float:
    best = 0.0
    for start in range(0, len(points), 512):
        block = points[start:start + 512]
        d2 = ((block[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1)
        best = max(best, float(d2.max()))
    return math.sqrt(best)


def _attractor_hull(system: IFSystem, k_probe: int, tol: float):
    """Hull vertices of ``A_k`` for the first ``k`` with ``2 R r_max^k`` below ``tol``.

    Returns ``(vertices, R_lo, R_hi, slack)``: the vertices are points of the
    attractor and every point of the attractor lies within ``slack`` of
    their convex hull.
    """
    from .cloud import fixed_point_coords
    r_max = float(system.ratios.max())
    pts = fixed_point_coords(system)
    for k in range(1, k_probe + 1):
        if k > 1:
            pts = np.concatenate([f(pts) for f in system.maps])
        pts = _hull_vertices(pts)
        R_lo = _max_pairwise(pts)
        shrink = 1.0 - 2.0 * r_max ** k
        if shrink <= 0.0:
            continue
        R_hi = R_lo / shrink
        if R_hi - R_lo <= tol:
            return pts, R_lo, R_hi, R_hi * r_max ** k
    raise TolNotReached(f"diameter bracket wider than {tol} after {k_probe} levels")


def diameter(system: IFSystem, k_probe: int = DEFAULT_DEPTH, tol: float = DEFAULT_TOL,
             use_known: bool = True):
    """Certified bracket ``(R_lo, R_hi)`` for the diameter of the attractor.

    ``R_lo`` is the diameter of the level-k cloud, ``R_hi = R_lo / (1 - 2 r_max^k)``.
    Only the convex-hull vertices of each level are propagated, which leaves
    the cloud diameter unchanged.
    """
    if use_known and system.known_constants is not None:
        R = float(system.known_constants.R)
        return R, R
    _, R_lo, R_hi, _ = _attractor_hull(system, k_probe, tol)
    return R_lo, R_hi


def _compose(a, b):
    """Composite (ratio, linear, translation) of ``a o b``."""
    ra, la, ta = a
    rb, lb, tb = b
    return ra * rb, la @ lb, la @ tb + ta


def separation_gap(system: IFSystem, k_probe: int = DEFAULT_DEPTH, tol: float = DEFAULT_TOL,
                   R_hi: Optional[float] = None, use_known: bool = True,
                   max_pairs: int = 200_000):
    """Certified bracket ``(c_lo, c_hi)`` for the minimum distance between distinct first-level cylinders.

    Branch and bound over pairs of cylinders ``(E_u, E_v)`` with different
    first letters.  Each cylinder is the image of a hull approximation of the
    attractor; vertex distances bound ``c`` from above, and a separating
    direction ``d`` bounds the pair from below by the gap between the
    supports of the two images along ``d``.  The pair with the smallest
    lower bound is refined (its larger cylinder split) until the bracket is
    narrower than ``tol``.
    """
    if use_known and system.known_constants is not None:
        c = float(system.known_constants.c)
        return c, c
    verts, _, R_top, slack = _attractor_hull(system, k_probe, tol * 1e-3)
    if R_hi is None:
        R_hi = R_top
    n = system.ambient_dim
    axes = np.vstack([np.eye(n), -np.eye(n)])
    maps = [(f.ratio, f.linear, f.translation) for f in system.maps]
    counter = itertools.count()
    heap = []
    c_hi = math.inf

    def push(u, v, depth_u, depth_v, floor):
        nonlocal c_hi
        pu = verts @ u[1].T + u[2]
        pv = verts @ v[1].T + v[2]
        diff = pv[:, None, :] - pu[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        iv, iu = np.unravel_index(np.argmin(d2), d2.shape)
        c_hi = min(c_hi, math.sqrt(float(d2[iv, iu])))
        dirs = [axes]
        gap = pv[iv] - pu[iu]
        if np.any(gap):
            dirs.append(gap[None, :] / np.linalg.norm(gap))
        dirs = np.vstack(dirs)
        sep = (pv @ dirs.T).min(axis=0) - (pu @ dirs.T).max(axis=0)
        lo = float(sep.max()) - slack * (u[0] + v[0])
        lo = max(floor, lo, math.sqrt(float(d2[iv, iu])) - R_hi * (u[0] + v[0]))
        heapq.heappush(heap, (lo, next(counter), u, v, depth_u, depth_v))

    for i, j in itertools.combinations(range(system.m), 2):
        push(maps[i], maps[j], 1, 1, -math.inf)

    pops = 0
    while heap:
        lo, _, u, v, du, dv = heapq.heappop(heap)
        if c_hi <= 0.0:
            raise NotSeparated("two cylinders share a point: the system is not separated")
        if c_hi - lo <= tol:
            if lo <= 0.0:
                raise NotSeparated(f"gap bracket [{lo}, {c_hi}] does not exclude zero")
            return lo, c_hi
        pops += 1
        split_u = u[0] >= v[0]
        if (du if split_u else dv) >= k_probe:
            split_u = not split_u
        if (du if split_u else dv) >= k_probe or pops > max_pairs:
            if lo <= 0.0:
                raise NotSeparated(
                    f"lower gap bound still {lo:.3g} after refinement: separation undecided")
            raise TolNotReached(f"gap bracket [{lo}, {c_hi}] wider than tol={tol}")
        for f in maps:
            if split_u:
                push(_compose(u, f), v, du + 1, dv, lo)
            else:
                push(u, _compose(v, f), du, dv + 1, lo)
    raise NotSeparated("empty search")  # pragma: no cover


def derive_constants(system: IFSystem, k_probe: int = DEFAULT_DEPTH, tol: float = DEFAULT_TOL,
                     use_known: bool = True) -> DerivedConstants:
    R_lo, R_hi = diameter(system, k_probe, tol, use_known=use_known)
    c_lo, c_hi = separation_gap(system, k_probe, tol, R_hi=R_hi, use_known=use_known)
    ratios = system.ratios
    return DerivedConstants(s=similarity_dimension(system), r_min=float(ratios.min()),
                            r_max=float(ratios.max()), c_lo=c_lo, c_hi=c_hi,
                            R_lo=R_lo, R_hi=R_hi)


def window_feasible(system: IFSystem, k: int) -> bool:
    """True when ``c - 3 R r_max^k - 2 R r_max^(k+1) > 0`` with the smallest c and largest R."""
    C = system.constants
    return C.c_lo - 3.0 * C.R_hi * C.r_max ** k - 2.0 * C.R_hi * C.r_max ** (k + 1) > 0.0
