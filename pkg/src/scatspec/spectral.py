"""Dense self-adjoint linear algebra.

Matrices are plain numpy arrays.  :func:`as_hermitian` validates them and
returns a real-symmetric array whenever every imaginary part is exactly zero
(the fast path); otherwise a complex Hermitian array.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError, UnstableThresholdWarning
from .symbols import SymbolFunction, dilate_symbol

__all__ = [
    "TOL_EIG",
    "HERMITIAN_TOL",
    "UNSTABLE_BAND",
    "SpectralDecomposition",
    "as_hermitian",
    "eigendecompose",
    "apply_function",
    "counting_above",
    "count_above_sorted",
    "difference_matrix",
    "difference_spectrum",
]

TOL_EIG = 1e-10
HERMITIAN_TOL = 1e-12
UNSTABLE_BAND = 1e-9


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and, optionally, orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        if u is None:
            raise ValueError("decomposition was computed without eigenvectors")
        return (u * self.eigenvalues) @ u.conj().T

    def by_modulus(self) -> np.ndarray:
        """Eigenvalues sorted by decreasing absolute value."""
        e = self.eigenvalues
        return e[np.argsort(-np.abs(e), kind="stable")]


def as_hermitian(a, tol: float = HERMITIAN_TOL, fast_path: bool = True) -> np.ndarray:
    """Validate ``a`` as a Hermitian matrix and return it in canonical storage.

    The asymmetry ``max |a - a^H|`` may not exceed ``tol * max(1, max|a|)``;
    accepted input is symmetrised so the stored entries are exactly Hermitian.
    With ``fast_path=False`` real input is promoted to complex storage.

    Raises
    ------
    NotHermitianError
        If ``a`` is not square, is empty, or is asymmetric beyond ``tol``.
    """
    a = np.asarray(a)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NotHermitianError(f"expected a non-empty square matrix, got shape {a.shape}")
    if np.iscomplexobj(a):
        if fast_path and not np.any(a.imag):
            a = a.real
    else:
        a = a.astype(np.float64 if fast_path else np.complex128, copy=False)
    asym = float(np.max(np.abs(a - a.conj().T)))
    scale = max(1.0, float(np.max(np.abs(a))))
    if asym > tol * scale:
        i, j = np.unravel_index(np.argmax(np.abs(a - a.conj().T)), a.shape)
        raise NotHermitianError(
            f"matrix is not Hermitian: max |A - A^H| = {asym:.3e} at entry ({i}, {j}), "
            f"tolerance {tol * scale:.1e}"
        )
    return 0.5 * (a + a.conj().T)


def eigendecompose(a, vectors: bool = True, fast_path: bool = True) -> SpectralDecomposition:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    a = as_hermitian(a, fast_path=fast_path)
    if vectors:
        w, u = np.linalg.eigh(a)
        return SpectralDecomposition(w, u)
    return SpectralDecomposition(np.linalg.eigvalsh(a))


def apply_function(a, phi: SymbolFunction, decomposition: Optional[SpectralDecomposition] = None):
    """Return ``phi(A) = U diag(phi(lambda_i)) U^*``.

    A precomputed ``decomposition`` of ``a`` may be passed to skip the
    eigensolver.
    """
    dec = decomposition if decomposition is not None else eigendecompose(a)
    u = dec.eigenvectors
    vals = np.asarray(phi(dec.eigenvalues), dtype=float)
    out = (u * vals) @ u.conj().T
    return 0.5 * (out + out.conj().T)


def count_above_sorted(eigenvalues, s: float) -> tuple[int, int]:
    """Counts ``#{e > s}`` and ``#{e < -s}`` for an ascending eigenvalue array."""
    e = np.asarray(eigenvalues)
    n = e.size
    n_plus = n - int(np.searchsorted(e, s, side="right"))
    n_minus = int(np.searchsorted(e, -s, side="left"))
    return n_plus, n_minus


def counting_above(a, s: float, *, eigenvalues=None) -> tuple[int, int]:
    """Return ``(N_A(s, inf), N_{-A}(s, inf))`` for ``s > 0``.

    Emits :class:`UnstableThresholdWarning` when ``s`` or ``-s`` lies within
    ``UNSTABLE_BAND`` of an eigenvalue; the counts are returned regardless.
    """
    if not s > 0:
        raise ValueError(f"threshold must be positive, got {s}")
    if eigenvalues is None:
        eigenvalues = eigendecompose(a, vectors=False).eigenvalues
    e = np.sort(np.asarray(eigenvalues, dtype=float))
    if e.size and min(np.min(np.abs(e - s)), np.min(np.abs(e + s))) < UNSTABLE_BAND:
        warnings.warn(
            f"threshold s={s!r} is within {UNSTABLE_BAND:g} of an eigenvalue",
            UnstableThresholdWarning,
            stacklevel=2,
        )
    return count_above_sorted(e, s)


def _shifted(a, lam):
    return a - lam * np.eye(a.shape[0])


def difference_matrix(h0, h, phi: SymbolFunction, delta: float, lam: float = 0.0) -> np.ndarray:
    """Assemble ``phi_delta(H - lam) - phi_delta(H0 - lam)``."""
    h0 = as_hermitian(h0)
    h = as_hermitian(h)
    if h0.shape != h.shape:
        raise DimensionMismatchError(f"H0 has shape {h0.shape} but H has shape {h.shape}")
    phi_d = dilate_symbol(phi, delta)
    return apply_function(_shifted(h, lam), phi_d) - apply_function(_shifted(h0, lam), phi_d)


def difference_spectrum(h0, h, phi: SymbolFunction, delta: float, lam: float = 0.0,
                        vectors: bool = False) -> SpectralDecomposition:
    """Spectrum of ``A(delta) = phi_delta(H - lam) - phi_delta(H0 - lam)``.

    Eigenvectors are only computed when ``vectors`` is true; sweeps need the
    eigenvalues alone.
    """
    return eigendecompose(difference_matrix(h0, h, phi, delta, lam), vectors=vectors)
