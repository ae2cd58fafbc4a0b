"""Singular values of Hankel operators ``P_- phi P_+`` on ``L^2(R)``.

The Cayley map ``z = (x - i) / (x + i)`` carries the line Hardy spaces onto
the circle Hardy spaces and turns multiplication by ``phi`` into
multiplication by ``psi = phi o c^{-1}``.  On the circle the Hankel operator
has matrix ``Gamma[m, n] = psi_hat(m + n + 1)`` (``m, n >= 0``).  For
``phi = 1/(1 + x^2)`` one gets ``psi(z) = -1/(4z) + 1/2 - z/4``, so Gamma has
the single non-zero entry ``-1/4``.  Using the negative-index coefficients
instead would conjugate Gamma (``psi`` is real), leaving singular values
unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import hankel as _hankel
from scipy.linalg import svdvals

from .errors import HankelConvergenceError
from .symbols import SymbolFunction

__all__ = [
    "CircleSymbol",
    "HankelSpectrum",
    "cayley_preimage",
    "cayley_transfer",
    "hankel_matrix",
    "singular_values",
    "rank_one_oracle",
    "grid_exponent",
]

CONVERGENCE_TOL = 1e-7
TOP = 10
P_MIN, P_MAX = 6, 16


@dataclass(frozen=True)
class CircleSymbol:
    """``psi`` sampled at ``theta_j = 2 pi j / 2**p``; ``samples[0]`` (``x = inf``) is 0."""

    samples: np.ndarray
    p: int

    @property
    def value_at_one(self) -> float:
        return float(self.samples[0].real)

    def fourier_coefficients(self) -> np.ndarray:
        """``psi_hat(k)`` for ``k = 0..2**p - 1`` (negative ``k`` wrap around)."""
        return np.fft.fft(self.samples) / self.samples.size


@dataclass(frozen=True)
class HankelSpectrum:
    """Singular values (descending) of an ``M x M`` truncation.

    ``tail_bound`` estimates ``mu_{M+1}``; ``analytic`` marks closed-form values.
    """

    singular_values: np.ndarray
    M: int
    tail_bound: float
    analytic: bool = False

    def __post_init__(self):
        sv = np.asarray(self.singular_values, dtype=float)
        if np.any(sv < 0) or np.any(np.diff(sv) > 0):
            raise ValueError("singular values must be non-negative and descending")
        if self.tail_bound < 0:
            raise ValueError("tail bound must be non-negative")

    @property
    def top(self) -> float:
        return float(self.singular_values[0]) if len(self.singular_values) else 0.0

    def to_dict(self, limit: int = 20) -> dict:
        return {
            "M": self.M,
            "tail_bound": self.tail_bound,
            "analytic": self.analytic,
            "singular_values": [float(x) for x in self.singular_values[:limit]],
        }


def cayley_preimage(theta):
    """Point ``x`` on the line with ``(x - i)/(x + i) = exp(i theta)``: ``x = -cot(theta/2)``."""
    theta = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore"):
        return -1.0 / np.tan(0.5 * theta)


def cayley_transfer(phi: SymbolFunction, p: int) -> CircleSymbol:
    """Sample ``psi = phi o c^{-1}`` on the uniform grid of ``2**p`` points."""
    if not P_MIN <= p <= P_MAX:
        raise ValueError(f"grid exponent must lie in [{P_MIN}, {P_MAX}], got {p}")
    n = 2**p
    theta = 2.0 * np.pi * np.arange(1, n) / n
    samples = np.zeros(n)
    samples[1:] = phi(cayley_preimage(theta))
    return CircleSymbol(samples, p)


def grid_exponent(M: int) -> int:
    """Grid exponent for truncation ``M``: ``2**p >= 16 M`` so that the doubled
    run still uses only coefficients up to a quarter of the grid."""
    p = max(P_MIN, int(np.ceil(np.log2(16 * M))))
    if p > P_MAX:
        raise ValueError(f"truncation M={M} needs grid exponent {p} > {P_MAX}")
    return p


def hankel_matrix(phi: SymbolFunction, M: int, p: Optional[int] = None) -> np.ndarray:
    """``M x M`` matrix ``Gamma[m, n] = psi_hat(m + n + 1)``."""
    p = grid_exponent(M) if p is None else p
    if M > 2 ** (p - 2):
        raise ValueError(f"M={M} exceeds 2**(p-2) for p={p}")
    c = cayley_transfer(phi, p).fourier_coefficients()
    col = c[1:M + 1]
    row = c[M:2 * M]
    gamma = _hankel(col, row)
    if not np.any(gamma.imag):
        gamma = gamma.real
    return gamma


def singular_values(phi: SymbolFunction, M: int, p: Optional[int] = None,
                    tol: float = CONVERGENCE_TOL) -> HankelSpectrum:
    """Hankel singular values at truncation ``M`` with a doubling check.

    The computation is repeated at ``2M`` on the same grid; the leading
    ``min(10, M)`` values may move by less than ``tol``.  ``tail_bound`` is
    the ``(M+1)``-th value of the ``2M`` run.

    Raises
    ------
    HankelConvergenceError
        If the doubling check fails; both value sets are attached.
    """
    if M < 1:
        raise ValueError("truncation size must be positive")
    p = grid_exponent(2 * M) if p is None else p
    if 2 * M > 2 ** (p - 2):
        raise ValueError(f"doubled truncation 2M={2 * M} exceeds 2**(p-2) for p={p}")
    sv = svdvals(hankel_matrix(phi, M, p))
    sv2 = svdvals(hankel_matrix(phi, 2 * M, p))
    top = min(TOP, M)
    moved = float(np.max(np.abs(sv[:top] - sv2[:top])))
    if not moved < tol:
        raise HankelConvergenceError(
            f"increase M: top {top} singular values moved by {moved:.2e} from M={M} to {2 * M}",
            sv, sv2)
    return HankelSpectrum(sv, M, float(sv2[M]))


def rank_one_oracle(a: float = 1.0) -> HankelSpectrum:
    """Exact spectrum for ``phi(x) = 1/(1 + (x/a)^2)``: ``mu_1 = 1/4``, all others 0.

    The Hankel operator is ``f -> -(1/4) v <f, conj v>`` with
    ``v(x) = pi^{-1/2} / (x - i)`` of unit norm; dilations act unitarily and
    commute with the Hardy projections, so ``a`` does not matter.
    """
    if not a > 0:
        raise ValueError("width must be positive")
    return HankelSpectrum(np.array([0.25]), 1, 0.0, analytic=True)
