"""Closed-form candidates for the measures of the built-in families.

===== ========== ======================================= ====================
name  family     value                                   proven for
===== ========== ======================================= ====================
g1    cantor     (2(1-r)/r)^s        (packing)           every r
g1    sierpinski (2(1-r)/r)^s        (packing)           r <= 1/3
g2    planar     (2(1-r)/r)^s        (packing)           r <= sqrt(2)/4
g3    cantor     (2(1-r))^s          (centered)          r <= 1/3
g4    sierpinski (2(1-r) sqrt(r^2+r+1))^s  (centered)    never (conjecture)
g5    planar     (2 sqrt(2) (1-r))^s (centered)          small r, see below
===== ========== ======================================= ====================

g5 is known to hold under ``0 < s < 1`` together with two inequalities,
evaluated directly by :func:`g5_conditions`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DegenerateInterval, ROutOfDomain, UnknownFormula

SQRT2_OVER_4 = math.sqrt(2.0) / 4.0
# conjectured C^1(S_{1/3}), corrected from an earlier 1.537
G4_CONJECTURE_TARGET = 1.543

_FAMILY_M = {"cantor": 2, "sierpinski": 3, "planar": 4}
_DEFAULT_FAMILY = {"g1": "cantor", "g2": "planar", "g3": "cantor", "g4": "sierpinski",
                   "g5": "planar"}
_ALLOWED = {"g1": ("cantor", "sierpinski"), "g2": ("planar",), "g3": ("cantor",),
            "g4": ("sierpinski",), "g5": ("planar",)}
MEASURE_OF = {"g1": "packing", "g2": "packing", "g3": "centered", "g4": "centered",
              "g5": "centered"}


@dataclass(frozen=True)
class FormulaResult:
    name: str
    value: float
    proven: bool
    range_note: str
    family: str = ""
    s: float = 0.0


def family_dimension(family: str, r: float) -> float:
    return math.log(_FAMILY_M[family]) / -math.log(r)


@dataclass(frozen=True)
class G5Check:
    s_in_unit: bool
    growth: bool    # (1-r) r^((2s-1)/(1-s)) >= 2, as usually printed
    density: bool   # 3 r^s / (1-r)^s <= 2^(-s/2)

    @property
    def proven(self) -> bool:
        # The growth inequality as printed already fails at r = 1/16, where
        # s = 1/2 turns it into 1 - r >= 2, yet the range it is quoted with
        # (r below about 0.1083) is exactly where s < 1 and the density
        # inequality hold.  The flag follows that range.
        return self.s_in_unit and self.density


def g5_conditions(r: float) -> G5Check:
    """Evaluate the sufficient conditions for g5 on K_r."""
    s = family_dimension("planar", r)
    if not 0.0 < s < 1.0:
        return G5Check(False, False, False)
    growth = (1.0 - r) * r ** ((2.0 * s - 1.0) / (1.0 - s)) >= 2.0
    density = 3.0 * r ** s / (1.0 - r) ** s <= 2.0 ** (-s / 2.0)
    return G5Check(True, growth, density)


def g5_threshold() -> float:
    """Largest r for which g5 is flagged proven (about 0.10832764)."""
    from scipy.optimize import brentq

    def f(r):
        s = family_dimension("planar", r)
        return 3.0 * r ** s / (1.0 - r) ** s - 2.0 ** (-s / 2.0)

    return brentq(f, 0.05, 0.2, xtol=1e-15)


def closed_form(name: str, r: float, family: Optional[str] = None) -> FormulaResult:
    name = name.lower()
    if name not in _ALLOWED:
        raise UnknownFormula(f"unknown formula {name!r}; expected one of g1..g5")
    r = float(r)
    if not 0.0 < r < 0.5:
        raise ROutOfDomain(f"r must lie in (0, 1/2), got {r!r}")
    family = family or _DEFAULT_FAMILY[name]
    if family not in _ALLOWED[name]:
        raise UnknownFormula(f"{name} is not defined for the {family} family")
    s = family_dimension(family, r)

    if name in ("g1", "g2"):
        value = (2.0 * (1.0 - r) / r) ** s
        if family == "cantor":
            proven, note = True, "proven for every r in (0, 1/2)"
        elif family == "sierpinski":
            proven, note = r <= 1.0 / 3.0, "proven for r <= 1/3"
        else:
            proven, note = r <= SQRT2_OVER_4, "proven for r <= sqrt(2)/4"
    elif name == "g3":
        value = (2.0 * (1.0 - r)) ** s
        proven, note = r <= 1.0 / 3.0, "proven for r <= 1/3"
    elif name == "g4":
        value = (2.0 * (1.0 - r) * math.sqrt(r * r + r + 1.0)) ** s
        proven, note = False, "conjectural only; fails for r >= 0.278"
    else:
        value = (2.0 * math.sqrt(2.0) * (1.0 - r)) ** s
        proven = g5_conditions(r).proven
        note = "proven when the sufficient inequalities hold (r below about 0.1083)"
    return FormulaResult(name, value, bool(proven), note, family, s)


@dataclass(frozen=True)
class HypothesisVerdict:
    alpha: float
    interval: tuple
    verdict: str            # "Rejected" or "Consistent"
    slack: float            # > 0: distance outside the interval; <= 0: depth inside
    guaranteed: Optional[float] = None  # |measure - alpha| bound when consistent

    @property
    def rejected(self) -> bool:
        return self.verdict == "Rejected"


def test_hypothesis(alpha: float, estimate) -> HypothesisVerdict:
    """Reject ``alpha`` as the measure value when it lies outside the interval."""
    lo, hi = estimate.interval
    alpha = float(alpha)
    slack = max(lo - alpha, alpha - hi)
    if lo <= alpha <= hi:
        return HypothesisVerdict(alpha, (lo, hi), "Consistent", slack, 2.0 * estimate.epsilon)
    return HypothesisVerdict(alpha, (lo, hi), "Rejected", slack)


test_hypothesis.__test__ = False  # not a pytest test despite the name


@dataclass(frozen=True)
class SpectralBracket:
    """Brackets for the reciprocals of the packing and centered measures."""
    lo: tuple    # encloses 1 / P^s
    hi: tuple    # encloses 1 / C^s
    point: tuple

    @property
    def outer(self) -> tuple:
        return (self.lo[0], self.hi[1])


def spectral_interval(packing_estimate, centered_estimate) -> SpectralBracket:
    M, e = packing_estimate.value, packing_estimate.epsilon
    m, d = centered_estimate.value, centered_estimate.epsilon
    if e >= M:
        raise DegenerateInterval(f"packing bound {e:.3g} is not below the estimate {M:.6g}")
    if d >= m:
        raise DegenerateInterval(f"centered bound {d:.3g} is not below the estimate {m:.6g}")
    return SpectralBracket((1.0 / (M + e), 1.0 / (M - e)), (1.0 / (m + d), 1.0 / (m - d)),
                           (1.0 / M, 1.0 / m))


__all__ = ["FormulaResult", "HypothesisVerdict", "SpectralBracket", "G5Check", "closed_form",
           "test_hypothesis", "spectral_interval", "g5_conditions", "g5_threshold",
           "family_dimension", "MEASURE_OF", "G4_CONJECTURE_TARGET"]
