"""Scattering matrices for one-dimensional pairs.

Lattice potentials with compact support get two independent routes:

* :func:`transfer_smatrix` -- products of one-site transfer matrices matched
  to plane waves outside the support;
* :func:`stationary_smatrix` -- ``S = I - 2 pi i Z V0 (I + T V0)^{-1} Z^*`` with
  ``T = G R0(lambda + i0) G`` built from the closed-form free Green function.

Channel order is (right-moving, left-moving), so ``S = [[t, r_R], [r_L, t]]``.
For the lattice with ``lambda = 2 cos k``, ``k in (0, pi)``, the right-moving
wave is ``exp(-i k n)`` (group velocity ``-2 sin k``); for the continuum with
``lambda = k**2`` it is ``exp(i k x)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import _kernels
from .errors import (BandEdgeError, PotentialError, QuadratureWarning, ResolutionError,
                     ScatSpecError, SpectralIrregularityError)
from .models import LatticeModel, PotentialSpec, continuum_grid
from .spectral import apply_function, as_hermitian, eigendecompose
from .symbols import SymbolFunction

__all__ = [
    "UNITARITY_TOL",
    "COND_LIMIT",
    "ScatteringResult",
    "StationaryIngredients",
    "BirmanKreinReport",
    "free_lattice_green",
    "regularized_lattice_green",
    "stationary_smatrix",
    "transfer_smatrix",
    "continuum_smatrix",
    "square_well_transmission",
    "birman_krein_checks",
    "spectral_shift",
]

UNITARITY_TOL = 1e-8
COND_LIMIT = 1e8
BAND_MARGIN = 1e-6
SIN_K_MIN = 1e-3
CONTINUUM_MIN_ENERGY = 0.05
RICHARDSON_TOL = 1e-6
NEGLIGIBLE_V = 1e-10


def _sorted_eigs(s):
    w = np.linalg.eigvals(s)
    # |s - 1| descending, ties broken by phase so the order is reproducible
    order = np.lexsort((np.round(np.angle(w), 12), -np.round(np.abs(w - 1.0), 12)))
    return tuple(complex(z) for z in w[order])


@dataclass(frozen=True)
class ScatteringResult:
    """Scattering matrix at one energy.

    ``s_eigs`` are the eigenvalues of ``S`` sorted by ``|s - 1|`` descending.
    ``regularity_margin`` is ``min(|sin k|, 2 - |lambda|)`` on the lattice and
    ``lambda`` in the continuum.  ``extra`` carries route-specific diagnostics.
    """

    lam: float
    k: float
    S: np.ndarray
    s_eigs: tuple
    method: str
    regularity_margin: float
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(cls, lam, k, s, method, margin, **extra):
        s = np.asarray(s, dtype=complex)
        return cls(float(lam), float(k), s, _sorted_eigs(s), method, float(margin), extra)

    @property
    def unitarity_defect(self) -> float:
        s = self.S
        return float(np.linalg.norm(s.conj().T @ s - np.eye(s.shape[0]), 2))

    @property
    def det_residual(self) -> float:
        """``|det S - prod s_n|``."""
        return float(abs(np.linalg.det(self.S) - np.prod(np.array(self.s_eigs))))

    @property
    def transmission(self) -> complex:
        return complex(self.S[0, 0])

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "k": self.k,
            "method": self.method,
            "S": [[[z.real, z.imag] for z in row] for row in self.S.tolist()],
            "s_eigs": [[z.real, z.imag] for z in self.s_eigs],
            "abs_s_minus_1": [abs(z - 1.0) for z in self.s_eigs],
            "regularity_margin": self.regularity_margin,
            "unitarity_defect": self.unitarity_defect,
        }


@dataclass(frozen=True)
class StationaryIngredients:
    """Pieces of the stationary formula, indexed by the potential's support sites."""

    sites: tuple
    T: np.ndarray
    Z: np.ndarray
    Y: np.ndarray
    condition_number: float


def _lattice_k(lam):
    if not abs(lam) < 2.0 - BAND_MARGIN:
        raise BandEdgeError(f"band edge: lambda={lam} is not inside (-2, 2) with margin {BAND_MARGIN}")
    return float(np.arccos(lam / 2.0))


def free_lattice_green(lam: float, n, m):
    """Boundary value ``<delta_n, (H0 - lambda - i0)^{-1} delta_m>`` on the full line.

    With ``lambda = 2 cos k``, ``k in (0, pi)`` the value is
    ``i exp(-i k |n - m|) / (2 sin k)``.  Broadcasts over ``n`` and ``m``.
    """
    k = _lattice_k(lam)
    d = np.abs(np.asarray(n) - np.asarray(m))
    return 1j * np.exp(-1j * k * d) / (2.0 * np.sin(k))


def regularized_lattice_green(lam: float, n: int, m: int, L: int = 2000,
                              eps: Sequence[float] = (4e-2, 2e-2, 1e-2)) -> complex:
    """Validation route for :func:`free_lattice_green`.

    Solves ``(H0 - lambda - i eps) g = delta_m`` on the Dirichlet lattice
    ``-L..L`` for each ``eps`` and extrapolates to ``eps -> 0`` with the
    interpolating polynomial in ``eps``.  The ``eps`` values must be large
    enough that the damping length ``2 sin k / eps`` is much shorter than ``L``.
    """
    from scipy.linalg import solve_banded

    size = 2 * L + 1
    rhs = np.zeros(size, dtype=complex)
    rhs[m + L] = 1.0
    values = []
    for e in eps:
        ab = np.zeros((3, size), dtype=complex)
        ab[0, 1:] = 1.0
        ab[2, :-1] = 1.0
        ab[1, :] = -(lam + 1j * e)
        values.append(solve_banded((1, 1), ab, rhs)[n + L])
    coef = np.polyfit(np.asarray(eps), np.asarray(values), len(eps) - 1)
    return complex(coef[-1])


def _lattice_margin(lam, k):
    return min(abs(np.sin(k)), 2.0 - abs(lam))


def stationary_smatrix(model: LatticeModel, lam: float):
    """Scattering matrix from the stationary representation.

    Returns ``(ScatteringResult, StationaryIngredients)``.  ``Z`` has rows for
    the two plane-wave channels, normalised with the spectral weight
    ``1 / (2 pi |2 sin k|)``:
    ``Z[0, j] = g_j exp(i k n_j) / sqrt(4 pi sin k)`` and
    ``Z[1, j] = g_j exp(-i k n_j) / sqrt(4 pi sin k)``.

    Raises
    ------
    BandEdgeError
        ``|lambda| >= 2 - 1e-6`` or ``|sin k| < 1e-3``.
    SpectralIrregularityError
        ``cond(I + T V0) >= 1e8``.
    """
    k = _lattice_k(lam)
    sin_k = np.sin(k)
    if sin_k < SIN_K_MIN:
        raise BandEdgeError(f"too close to band edge: |sin k|={sin_k:.2e}")
    sites_map = model.potential.sites()
    margin = _lattice_margin(lam, k)
    if not sites_map:
        ing = StationaryIngredients((), np.zeros((0, 0), complex), np.zeros((2, 0), complex),
                                    np.zeros((0, 0), complex), 1.0)
        return ScatteringResult.build(lam, k, np.eye(2, dtype=complex), "stationary", margin,
                                      condition_number=1.0), ing
    sites = np.array(list(sites_map))
    v = np.array([sites_map[n] for n in sites])
    g = np.sqrt(np.abs(v))
    v0 = np.diag(np.sign(v))
    T = g[:, None] * free_lattice_green(lam, sites[:, None], sites[None, :]) * g[None, :]
    core = np.eye(len(sites)) + T @ v0
    cond = float(np.linalg.cond(core))
    if not cond < COND_LIMIT:
        raise SpectralIrregularityError(
            f"spectral irregularity at lambda={lam}: cond(I + T V0) = {cond:.3e}", cond)
    Y = v0 @ np.linalg.inv(core)
    norm = 1.0 / np.sqrt(4.0 * np.pi * sin_k)
    Z = np.vstack([g * np.exp(1j * k * sites), g * np.exp(-1j * k * sites)]) * norm
    S = np.eye(2) - 2j * np.pi * Z @ Y @ Z.conj().T
    res = ScatteringResult.build(lam, k, S, "stationary", margin, condition_number=cond)
    if res.unitarity_defect > UNITARITY_TOL:
        raise ScatSpecError(f"stationary S is not unitary (defect {res.unitarity_defect:.2e})")
    return res, StationaryIngredients(tuple(int(n) for n in sites), T, Z, Y, cond)


def _coefficients_from_k(K):
    """(t_left, t_right, r_left, r_right) from the plane-wave coefficient map ``K``.

    ``K`` maps (right-moving, left-moving) amplitudes left of the scatterer to
    those on the right.  Left incidence: ``(t, 0) = K (1, r_L)``; right
    incidence: ``(r_R, 1) = K (0, t)``.
    """
    r_left = -K[1, 0] / K[1, 1]
    t_left = K[0, 0] + K[0, 1] * r_left
    t_right = 1.0 / K[1, 1]
    r_right = K[0, 1] / K[1, 1]
    return complex(t_left), complex(t_right), complex(r_left), complex(r_right)


def transfer_smatrix(model: LatticeModel, lam: float, *, kernels=None) -> ScatteringResult:
    """Scattering matrix from one-site transfer matrices.

    Raises
    ------
    BandEdgeError
        ``|lambda| >= 2 - 1e-6`` or ``|sin k| < 1e-3``.
    """
    k = _lattice_k(lam)
    if abs(np.sin(k)) < SIN_K_MIN:
        raise BandEdgeError(f"too close to band edge: |sin k|={np.sin(k):.2e}")
    margin = _lattice_margin(lam, k)
    sites = model.potential.sites()
    if not sites:
        return ScatteringResult.build(lam, k, np.eye(2, dtype=complex), "transfer", margin,
                                      t_left=1.0, t_right=1.0)
    a, b = min(sites), max(sites)
    v = np.array([sites.get(n, 0.0) for n in range(a, b + 1)])
    M = _kernels.transfer_product(lam, v, impl=kernels)

    def plane(n):
        # columns: right-moving exp(-ikn), left-moving exp(ikn); rows: u(n), u(n-1)
        return np.array([[np.exp(-1j * k * n), np.exp(1j * k * n)],
                         [np.exp(-1j * k * (n - 1)), np.exp(1j * k * (n - 1))]])

    K = np.linalg.solve(plane(b + 1), M @ plane(a))
    t_l, t_r, r_l, r_r = _coefficients_from_k(K)
    S = np.array([[t_l, r_r], [r_l, t_l]])
    res = ScatteringResult.build(lam, k, S, "transfer", margin, t_left=t_l, t_right=t_r)
    if res.unitarity_defect > UNITARITY_TOL:
        raise ScatSpecError(f"transfer S is not unitary (defect {res.unitarity_defect:.2e})")
    return res


def _continuum_propagator(V: PotentialSpec, lam, x_left, length, steps, kernels):
    step = length / steps
    x = x_left + step * np.arange(steps)
    nudge = 1e-9 * step
    # stage values are taken from inside each step so jumps at nodes are resolved
    vs = V(x + nudge)
    vm = V(x + 0.5 * step)
    ve = V(x + step - nudge)
    return _kernels.rk4_propagate(lam, step, vs, vm, ve, impl=kernels)


def _continuum_s(V, lam, k, x_left, x_right, steps, kernels):
    phi = _continuum_propagator(V, lam, x_left, x_right - x_left, steps, kernels)

    def plane(x):
        return np.array([[np.exp(1j * k * x), np.exp(-1j * k * x)],
                         [1j * k * np.exp(1j * k * x), -1j * k * np.exp(-1j * k * x)]])

    K = np.linalg.solve(plane(x_right), phi @ plane(x_left))
    t_l, t_r, r_l, r_r = _coefficients_from_k(K)
    return np.array([[t_l, r_r], [r_l, t_l]]), t_l, t_r


def continuum_smatrix(X: float, n: int, V: PotentialSpec, lam: float, *, kernels=None) -> ScatteringResult:
    """Scattering matrix of ``-u'' + V u = lambda u`` by direct integration.

    The fundamental matrix is propagated across ``[-X/2, X/2]`` with classical
    RK4 at step ``~h = 2X/(n+1)`` (rounded so the interval is an integer number
    of steps) and matched to ``exp(+-i k x)``, ``k = sqrt(lambda)``.  The run is
    repeated at half the step; the returned matrix is the finer one.

    Raises
    ------
    BandEdgeError
        ``lambda <= 0.05``.
    PotentialError
        ``|V| >= 1e-10`` at a grid node outside ``[-X/2, X/2]``.
    ResolutionError
        Step halving moves an entry of ``S`` by ``1e-6`` or more, or the
        result is not unitary to ``1e-8``.
    """
    if not lam > CONTINUUM_MIN_ENERGY:
        raise BandEdgeError(f"continuum energy must exceed {CONTINUUM_MIN_ENERGY}, got {lam}")
    k = float(np.sqrt(lam))
    x, h = continuum_grid(X, n)
    outside = np.abs(x) > X / 2
    if np.any(outside):
        vout = np.abs(V(x[outside]))
        if np.max(vout) >= NEGLIGIBLE_V:
            raise PotentialError(
                f"potential not negligible outside [-X/2, X/2]: max |V| = {np.max(vout):.2e}")
    steps = max(1, int(round(X / h)))
    # every point the fine run samples (nodes and half steps)
    probes = np.linspace(-X / 2, X / 2, 4 * steps + 1)
    if V.is_zero or not np.any(V(probes)):
        return ScatteringResult.build(lam, k, np.eye(2, dtype=complex), "continuum", lam,
                                      t_left=1.0, t_right=1.0, richardson_delta=0.0, steps=steps)
    coarse, _, _ = _continuum_s(V, lam, k, -X / 2, X / 2, steps, kernels)
    fine, t_l, t_r = _continuum_s(V, lam, k, -X / 2, X / 2, 2 * steps, kernels)
    delta = float(np.max(np.abs(fine - coarse)))
    if not delta < RICHARDSON_TOL:
        raise ResolutionError(
            f"resolution insufficient: halving the step changed S by {delta:.2e} "
            f"(steps={steps}, tolerance {RICHARDSON_TOL:g})")
    res = ScatteringResult.build(lam, k, fine, "continuum", lam, t_left=t_l, t_right=t_r,
                                 richardson_delta=delta, steps=2 * steps)
    if res.unitarity_defect > UNITARITY_TOL:
        raise ResolutionError(f"resolution insufficient: unitarity defect {res.unitarity_defect:.2e}")
    return res


def square_well_transmission(lam: float, depth: float, half_width: float) -> complex:
    """Closed-form transmission for ``V = -depth`` on ``[-a, a]``.

    ``t = exp(-2ika) / (cos 2qa - i (k^2 + q^2) / (2kq) sin 2qa)`` with
    ``q = sqrt(lambda + depth)``; phases refer to plane waves centred at 0.
    """
    k = np.sqrt(lam)
    q = np.sqrt(lam + depth + 0j)
    a = half_width
    return complex(np.exp(-2j * k * a)
                   / (np.cos(2 * q * a) - 1j * (k**2 + q**2) / (2 * k * q) * np.sin(2 * q * a)))


def spectral_shift(e0, e1, t):
    """``xi(t) = #{eig(H0) <= t} - #{eig(H) <= t}``.

    With this sign ``Tr(phi(H) - phi(H0)) = integral of phi'(t) xi(t) dt``;
    it is the one fixed by ``H0 = [0]``, ``H = [1]``.
    """
    e0 = np.sort(np.asarray(e0))
    e1 = np.sort(np.asarray(e1))
    t = np.asarray(t)
    return np.searchsorted(e0, t, side="right") - np.searchsorted(e1, t, side="right")


@dataclass(frozen=True)
class BirmanKreinReport:
    trace_side: float
    integral_sides: tuple
    residuals: tuple
    refinement_ok: bool
    det_residuals: tuple = ()

    @property
    def trace_residual(self) -> float:
        return self.residuals[-1]

    @property
    def max_det_residual(self) -> float:
        return max(self.det_residuals, default=0.0)

    def to_dict(self) -> dict:
        return {
            "trace_side": self.trace_side,
            "integral_sides": list(self.integral_sides),
            "residuals": list(self.residuals),
            "refinement_ok": self.refinement_ok,
            "det_residuals": list(self.det_residuals),
        }


def birman_krein_checks(h0, h, phi: SymbolFunction, grid: Sequence[int] = (1, 2, 4, 8),
                        scattering: Sequence[ScatteringResult] = (), nodes: int = 4,
                        floor: float = 1e-12) -> BirmanKreinReport:
    """Finite-dimensional trace identity and determinant/eigenvalue checks.

    ``Tr(phi(H) - phi(H0))`` is compared with ``int phi'(t) xi(t) dt`` computed
    by composite Gauss-Legendre quadrature (``nodes`` points per panel) on the
    intervals between consecutive eigenvalues, each split into ``p`` panels for
    every ``p`` in ``grid``.  The refinement is flagged (``refinement_ok =
    False`` plus a :class:`QuadratureWarning`) when the residual grows under
    refinement while still above ``floor``.  For every scattering result the
    residual ``|det S - prod s_n|`` is reported.
    """
    h0 = as_hermitian(h0)
    h = as_hermitian(h)
    d0 = eigendecompose(h0)
    d1 = eigendecompose(h)
    lhs = float(np.trace(apply_function(h, phi, d1) - apply_function(h0, phi, d0)).real)

    breaks = np.unique(np.concatenate([d0.eigenvalues, d1.eigenvalues]))
    lo, hi = breaks[:-1], breaks[1:]
    xi = spectral_shift(d0.eigenvalues, d1.eigenvalues, 0.5 * (lo + hi))
    keep = (xi != 0) & (hi > lo)
    lo, hi, xi = lo[keep], hi[keep], xi[keep]
    gx, gw = leggauss(nodes)

    sides, residuals = [], []
    for p in grid:
        total = 0.0
        if lo.size:
            edges = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, p + 1)[None, :]
            a, b = edges[:, :-1], edges[:, 1:]
            half = 0.5 * (b - a)
            t = 0.5 * (a + b)[..., None] + half[..., None] * gx
            vals = phi.derivative(t) @ gw * half
            total = float(np.sum(vals.sum(axis=1) * xi))
        sides.append(total)
        residuals.append(abs(total - lhs))
    ok = all(r2 <= max(r1, floor) for r1, r2 in zip(residuals, residuals[1:]))
    if not ok:
        warnings.warn(f"trace-formula residual not decreasing under refinement: {residuals}",
                      QuadratureWarning, stacklevel=2)
    dets = tuple(sc.det_residual for sc in scattering)
    return BirmanKreinReport(lhs, tuple(sides), tuple(residuals), ok, dets)
