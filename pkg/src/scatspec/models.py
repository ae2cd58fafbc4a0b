"""Finite truncations of Schroedinger-type pairs ``(H0, H = H0 + V)``.

Two families are provided:

* the discrete Laplacian ``(H0 u)(n) = u(n+1) + u(n-1)`` on sites ``-L..L``
  with Dirichlet ends and point-mass potentials;
* the second-order finite-difference ``-d^2/dx^2`` on ``[-X, X]`` with
  Dirichlet ends and a potential sampled on the grid.

Both also return the factorisation ``V = G V0 G`` with ``G = |V|^(1/2)`` and
``V0 = sign(V)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import PotentialError
from .symbols import dilate_symbol  # noqa: F401  (re-exported)

__all__ = [
    "PotentialSpec",
    "LatticeModel",
    "Factorization",
    "point_masses",
    "sampled_function",
    "gaussian_potential",
    "square_well",
    "potential_from_descriptor",
    "factorize",
    "build_lattice_pair",
    "build_continuum_pair",
    "continuum_grid",
    "dilate_symbol",
]

POINT_MASSES = "point-masses"
SAMPLED = "sampled-function"


@dataclass(frozen=True)
class PotentialSpec:
    """A perturbation ``V``.

    For ``kind == "point-masses"`` the ``samples`` are ``(site, value)`` pairs
    on the integer lattice.  For ``kind == "sampled-function"`` they are
    ``(x, V(x))`` pairs; ``func`` (if given) evaluates ``V`` anywhere,
    otherwise the samples are linearly interpolated and ``V`` is zero outside
    their range.
    """

    kind: str
    samples: tuple = ()
    decay_check: tuple[float, float] = (1.0, 2.0)
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in (POINT_MASSES, SAMPLED):
            raise PotentialError(f"unknown potential kind {self.kind!r}")
        if self.kind == SAMPLED:
            if self.decay_check[1] <= 1:
                raise PotentialError(f"decay exponent must exceed 1, got {self.decay_check[1]}")
            for x, v in self.samples:
                self._check_decay(np.array([x]), np.array([v]))

    @property
    def is_zero(self) -> bool:
        if self.func is not None:
            return False
        return all(v == 0 for _, v in self.samples)

    def sites(self) -> dict[int, float]:
        """Lattice site -> accumulated value (point-mass kind only)."""
        if self.kind != POINT_MASSES:
            raise PotentialError("sites() is only defined for point-mass potentials")
        out: dict[int, float] = {}
        for n, v in self.samples:
            if int(n) != n:
                raise PotentialError(f"lattice site {n!r} is not an integer")
            out[int(n)] = out.get(int(n), 0.0) + float(v)
        return {n: v for n, v in sorted(out.items()) if v != 0.0}

    def __call__(self, x) -> np.ndarray:
        """Evaluate a sampled-function potential at ``x``."""
        if self.kind != SAMPLED:
            raise PotentialError("only sampled-function potentials can be evaluated on the line")
        x = np.asarray(x, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(x), dtype=float) * np.ones_like(x)
        if not self.samples:
            return np.zeros_like(x)
        xs, vs = np.array(sorted(self.samples)).T
        return np.interp(x, xs, vs, left=0.0, right=0.0)

    def _check_decay(self, x, v):
        c, rho = self.decay_check
        bound = c * (1.0 + np.abs(x)) ** (-rho)
        bad = np.abs(v) > bound * (1 + 1e-12)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise PotentialError(
                f"decay check |V(x)| <= {c:g}(1+|x|)^-{rho:g} violated at x={x[i]:.6g}: "
                f"|V|={abs(v[i]):.3e} > {bound[i]:.3e}"
            )

    def checked_values(self, x) -> np.ndarray:
        """``V`` on the grid ``x``, enforcing the decay bound at every point."""
        v = self(x)
        self._check_decay(np.asarray(x, dtype=float), v)
        return v


def point_masses(sites: dict | Sequence) -> PotentialSpec:
    items = sites.items() if isinstance(sites, dict) else sites
    return PotentialSpec(POINT_MASSES, tuple((int(n), float(v)) for n, v in items))


def sampled_function(func=None, samples=(), decay=(1.0, 2.0), label="") -> PotentialSpec:
    return PotentialSpec(SAMPLED, tuple((float(x), float(v)) for x, v in samples),
                         tuple(map(float, decay)), func, label)


def gaussian_potential(amplitude=1.0, width=1.0, decay=None) -> PotentialSpec:
    """``amplitude * exp(-(x/width)^2)``.

    The default decay constant is the smallest ``C`` valid with ``rho = 2``
    (computed on a fine grid, with 5% margin).
    """
    amp, w = float(amplitude), float(width)

    def f(x):
        return amp * np.exp(-((x / w) ** 2))

    if decay is None:
        t = np.linspace(0, 20 * w, 200001)
        decay = (1.05 * float(np.max(np.abs(f(t)) * (1 + t) ** 2)), 2.0)
    return sampled_function(f, decay=decay, label=f"gaussian(amplitude={amp:g}, width={w:g})")


def square_well(depth=0.5, half_width=1.0, decay=None) -> PotentialSpec:
    """``V = -depth`` on ``[-half_width, half_width]``, zero elsewhere."""
    d, a = float(depth), float(half_width)

    def f(x):
        return np.where(np.abs(x) <= a, -d, 0.0)

    if decay is None:
        decay = (1.05 * abs(d) * (1 + a) ** 2, 2.0)
    return sampled_function(f, decay=decay, label=f"square_well(depth={d:g}, half_width={a:g})")


def potential_from_descriptor(desc: dict) -> PotentialSpec:
    """Parse the ``potential`` block of an experiment config.

    ``{"kind": "point-masses", "sites": [[0, 1.0], ...]}``,
    ``{"kind": "sampled-function", "samples": [[x, v], ...], "decay": [C, rho]}``,
    ``{"kind": "gaussian", "amplitude": a, "width": w}`` or
    ``{"kind": "square-well", "depth": d, "half_width": a}``.
    """
    kind = desc.get("kind")
    decay = desc.get("decay")
    if kind == POINT_MASSES:
        return point_masses([tuple(p) for p in desc.get("sites", [])])
    if kind == SAMPLED:
        return sampled_function(samples=[tuple(p) for p in desc.get("samples", [])],
                                decay=decay or (1.0, 2.0))
    if kind == "gaussian":
        return gaussian_potential(desc.get("amplitude", 1.0), desc.get("width", 1.0), decay)
    if kind == "square-well":
        return square_well(desc.get("depth", 0.5), desc.get("half_width", 1.0), decay)
    raise PotentialError(f"unknown potential kind {kind!r}")


@dataclass(frozen=True)
class LatticeModel:
    """Lattice on sites ``-L..L`` (dimension ``2L + 1``) with Dirichlet ends."""

    half_width: int
    potential: PotentialSpec

    def __post_init__(self):
        if self.half_width < 1:
            raise PotentialError("lattice half width must be positive")
        if self.potential.kind != POINT_MASSES:
            raise PotentialError("lattice models take point-mass potentials")
        sites = self.potential.sites()
        if sites:
            reach = max(abs(n) for n in sites)
            if 4 * reach > self.half_width:
                raise PotentialError(
                    f"potential reaches site {reach}; need L >= {4 * reach} "
                    f"(got L={self.half_width})"
                )

    @property
    def dim(self) -> int:
        return 2 * self.half_width + 1


@dataclass(frozen=True)
class Factorization:
    """Diagonal factors ``G = |V|^(1/2)`` and ``V0 = sign(V)`` as 1-D arrays."""

    g: np.ndarray
    v0: np.ndarray

    @property
    def G(self) -> np.ndarray:
        return np.diag(self.g)

    @property
    def V0(self) -> np.ndarray:
        return np.diag(self.v0)

    def potential(self) -> np.ndarray:
        return np.diag(self.g * self.v0 * self.g)


def factorize(v_diag) -> Factorization:
    v = np.asarray(v_diag, dtype=float)
    g = np.sqrt(np.abs(v))
    v0 = np.sign(v)
    # g*v0*g reproduces v exactly for squares of doubles, otherwise to one ulp
    return Factorization(g, v0)


def _tridiag(n, diag, off):
    return np.diag(np.full(n, float(diag))) + np.diag(np.full(n - 1, float(off)), 1) \
        + np.diag(np.full(n - 1, float(off)), -1)


def build_lattice_pair(L: int, pot: PotentialSpec):
    """Dirichlet lattice pair on ``-L..L``.

    Returns ``(H0, H, fact)`` where ``H0`` has zero diagonal and unit
    off-diagonals, ``H = H0 + diag(V)`` and ``fact`` factorises ``diag(V)``.
    Site ``n`` lives at row ``n + L``.
    """
    model = LatticeModel(int(L), pot)
    n = model.dim
    h0 = _tridiag(n, 0.0, 1.0) if n > 1 else np.zeros((1, 1))
    v = np.zeros(n)
    for site, value in pot.sites().items():
        v[site + model.half_width] += value
    fact = factorize(v)
    return h0, h0 + np.diag(v), fact


def continuum_grid(X: float, n: int) -> tuple[np.ndarray, float]:
    """Interior nodes ``x_i = -X + i h`` (``i = 1..n``) with ``h = 2X / (n + 1)``."""
    h = 2.0 * X / (n + 1)
    return -X + h * np.arange(1, n + 1), h


def build_continuum_pair(X: float, n: int, V: PotentialSpec):
    """Finite-difference pair for ``-d^2/dx^2 (+ V)`` on ``[-X, X]``.

    ``H0 = tridiag(-1, 2, -1) / h^2`` on ``n`` interior nodes.  The potential is
    sampled at the nodes and must satisfy its decay bound at each of them.
    """
    if not X > 0:
        raise ValueError("box half-length must be positive")
    if n < 3:
        raise ValueError("need at least 3 interior nodes")
    if V.kind != SAMPLED:
        raise PotentialError("continuum models take sampled-function potentials")
    x, h = continuum_grid(X, n)
    h0 = _tridiag(n, 2.0, -1.0) / h**2
    v = V.checked_values(x)
    fact = factorize(v)
    return h0, h0 + np.diag(v), fact
