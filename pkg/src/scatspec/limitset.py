"""The predicted limit set ``{+-mu_m |s_n - 1|} u {0}`` and its counting function.

Only the positive values are stored; the set is symmetric.  Every answer is
conditional on ``truncation_bound``: queries at or below it are refused.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateLimitSetError, TruncationError
from .hankel import HankelSpectrum
from .scattering import ScatteringResult

__all__ = [
    "MERGE_TOL",
    "RESOLUTION_FLOOR",
    "LimitSet",
    "build_sigma0",
    "N0",
    "multiplicity",
    "safe_thresholds",
    "local_gap",
]

MERGE_TOL = 1e-9
RESOLUTION_FLOOR = 1e-8
SAFETY = 2.0
MIN_GAP = 10 * MERGE_TOL


@dataclass(frozen=True)
class LimitSet:
    """Positive limit values (descending) with multiplicities and index sources.

    ``sources[i]`` lists the 1-based ``(m, n)`` pairs (Hankel index, channel
    index) whose products were merged into ``values[i]``.
    """

    values: tuple
    multiplicities: tuple
    truncation_bound: float
    sources: tuple = ()
    includes_zero: bool = field(default=True, init=False)

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("limit values must be strictly descending")
        if any(k < 1 for k in self.multiplicities):
            raise ValueError("multiplicities must be positive")
        if self.values and self.values[-1] <= self.truncation_bound:
            raise ValueError("every stored value must exceed the truncation bound")

    def expanded(self) -> np.ndarray:
        """Positive values repeated by multiplicity, descending."""
        return np.repeat(np.asarray(self.values, dtype=float), self.multiplicities)

    def to_dict(self) -> dict:
        return {
            "values": list(self.values),
            "multiplicities": list(self.multiplicities),
            "truncation_bound": self.truncation_bound,
            "sources": [[list(p) for p in src] for src in self.sources],
            "includes_zero": True,
        }


def build_sigma0(hs: HankelSpectrum, sc: ScatteringResult, *,
                 floor: float = RESOLUTION_FLOOR, dropped_channels: Sequence[complex] = (),
                 requested: Optional[Sequence[float]] = None) -> LimitSet:
    """Enumerate the products ``mu_m |s_n - 1|`` above the certificate level.

    The truncation bound is
    ``2 * max(2 * tail_bound, mu_1 * max|s - 1| over dropped channels, floor)``;
    ``floor`` is the numerical resolution below which products are treated as
    zero.  Products within ``MERGE_TOL`` of each other are merged.

    Raises
    ------
    TruncationError
        If the bound is not below the largest ``requested`` threshold.
    """
    mu = np.asarray(hs.singular_values, dtype=float)
    gaps = np.array([abs(s - 1.0) for s in sc.s_eigs])
    dropped = max((abs(s - 1.0) for s in dropped_channels), default=0.0)
    bound = SAFETY * max(2.0 * hs.tail_bound, hs.top * dropped, floor)
    if requested is not None and len(requested) and bound >= max(requested):
        raise TruncationError(
            f"insufficient truncation: bound {bound:.3e} >= largest requested threshold {max(requested):.3e}")

    prods = [(float(mu[m] * gaps[n]), m + 1, n + 1)
             for m in range(mu.size) for n in range(gaps.size) if mu[m] * gaps[n] > bound]
    prods.sort(key=lambda t: (-t[0], t[1], t[2]))

    values, mults, sources = [], [], []
    for val, m, n in prods:
        if values and values[-1] - val <= MERGE_TOL:
            mults[-1] += 1
            sources[-1].append((m, n))
        else:
            values.append(val)
            mults.append(1)
            sources.append([(m, n)])
    return LimitSet(tuple(values), tuple(mults), float(bound), tuple(tuple(s) for s in sources))


def _certify(ls: LimitSet, s: float):
    if not s > ls.truncation_bound:
        raise TruncationError(
            f"s={s:.3e} is not above the truncation bound {ls.truncation_bound:.3e}; count not certifiable")


def N0(ls: LimitSet, s: float) -> int:
    """``#{(n, m): mu_m |s_n - 1| > s}`` counted with multiplicity."""
    _certify(ls, s)
    return int(sum(k for v, k in zip(ls.values, ls.multiplicities) if v > s))


def multiplicity(ls: LimitSet, nu: float) -> int:
    """Multiplicity of ``|nu|`` in the limit set (0 if absent)."""
    a = abs(nu)
    _certify(ls, a)
    for v, k in zip(ls.values, ls.multiplicities):
        if abs(v - a) <= MERGE_TOL:
            return int(k)
    return 0


def local_gap(ls: LimitSet, i: int) -> float:
    """Distance from ``values[i]`` to its nearest neighbour in the set (0 included)."""
    v = ls.values
    below = v[i + 1] if i + 1 < len(v) else 0.0
    gap = v[i] - below
    if i > 0:
        gap = min(gap, v[i - 1] - v[i])
    return gap


def _inside(a, b):
    """Geometric midpoint of ``b < a``, pulled to at least 10% of ``a - b`` from each end."""
    g = a - b
    return float(np.clip(np.sqrt(a * b), b + 0.1 * g, a - 0.1 * g))


def safe_thresholds(ls: LimitSet) -> list[float]:
    """Thresholds away from the limit set, descending.

    One above the largest value (``1.5 v_1``), one inside each gap between
    consecutive values and one between the smallest value and the truncation
    bound.  Within a gap the geometric midpoint is used unless it lies closer
    than 10% of the gap to either end, in which case it is clipped.

    Raises
    ------
    DegenerateLimitSetError
        If the set is non-empty and no gap is wider than ``MIN_GAP``.
    """
    v = list(ls.values)
    if not v:
        return [2.0 * ls.truncation_bound]
    out = [1.5 * v[0]]
    usable = 0
    for a, b in zip(v, v[1:]):
        if a - b > MIN_GAP:
            out.append(_inside(a, b))
            usable += 1
    bottom = v[-1]
    if bottom - ls.truncation_bound > MIN_GAP:
        # keep 10% of the way from 0 (a member of the set) as well as above the bound
        s = max(_inside(bottom, ls.truncation_bound), 0.1 * bottom)
        if s < 0.9 * bottom:
            out.append(s)
            usable += 1
    if usable == 0:
        raise DegenerateLimitSetError("degenerate limit set: all gaps are below resolution")
    return out
