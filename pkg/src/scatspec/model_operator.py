"""Finite truncations of the model operator built from a Hankel matrix and ``S``.

Diagonalising ``S`` splits the operator into blocks, one per eigenvalue
``s_n``:  ``[[0, (s_n - 1) Gamma], [(conj(s_n) - 1) Gamma^*, 0]]``.  The
spectrum of each block is ``{+-|s_n - 1| sigma_m(Gamma)}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import ScatSpecError
from .hankel import grid_exponent, hankel_matrix, singular_values
from .limitset import LimitSet, build_sigma0
from .scattering import UNITARITY_TOL, ScatteringResult
from .spectral import eigendecompose
from .symbols import SymbolFunction, dilate_symbol

__all__ = [
    "ModelOperatorTruncation",
    "SpectrumMatchReport",
    "ScalingReport",
    "assemble",
    "assemble_tensor",
    "check_lemma_c1",
    "check_scaling",
    "spectrum_check",
    "smatrix_result",
    "random_unitary",
]

MATCH_TOL = 1e-8
SCALING_TOL = 1e-6


@dataclass(frozen=True)
class ModelOperatorTruncation:
    M: int
    S: np.ndarray
    matrix: np.ndarray
    blocks: tuple

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check_unitary(s):
    s = np.asarray(s, dtype=complex)
    defect = np.linalg.norm(s.conj().T @ s - np.eye(s.shape[0]), 2)
    if defect > UNITARITY_TOL:
        raise ScatSpecError(f"scattering matrix is not unitary (defect {defect:.2e})")
    return s


def _block(gamma, s):
    m = gamma.shape[0]
    z = np.zeros((m, m))
    return np.block([[z, (s - 1.0) * gamma], [(np.conj(s) - 1.0) * gamma.conj().T, z]])


def assemble(gamma, sc: ScatteringResult) -> ModelOperatorTruncation:
    """Direct sum over the eigenvalues of ``S`` of the antidiagonal blocks."""
    gamma = np.asarray(gamma)
    s = _check_unitary(sc.S)
    blocks = tuple(_block(gamma, sn) for sn in sc.s_eigs)
    mat = block_diag(*blocks)
    return ModelOperatorTruncation(gamma.shape[0], s, mat, blocks)


def assemble_tensor(gamma, sc: ScatteringResult) -> np.ndarray:
    """The same operator without diagonalising ``S``.

    On ``(H^2_- (+) H^2_+) (x) C^N`` it reads
    ``[[0, Gamma (x) (S - I)], [Gamma^* (x) (S^* - I), 0]]``.
    """
    gamma = np.asarray(gamma)
    s = _check_unitary(sc.S)
    eye = np.eye(s.shape[0])
    upper = np.kron(gamma, s - eye)
    z = np.zeros_like(upper)
    return np.block([[z, upper], [upper.conj().T, z]])


@dataclass(frozen=True)
class SpectrumMatchReport:
    passed: bool
    residual: float
    computed: np.ndarray
    predicted: np.ndarray
    tolerance: float = MATCH_TOL

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "computed_top": [float(x) for x in self.computed[:20]],
            "predicted_top": [float(x) for x in self.predicted[:20]],
        }


def check_lemma_c1(mot: ModelOperatorTruncation, ls: LimitSet, tol: float = MATCH_TOL) -> SpectrumMatchReport:
    """Compare the eigenvalues of the truncation with ``{+-nu}`` from the limit set.

    Eigenvalues above the truncation bound in modulus are matched, per sign,
    against the limit values expanded by multiplicity; the remaining
    eigenvalues must stay below the bound (plus ``tol``).
    """
    e = eigendecompose(mot.matrix, vectors=False).eigenvalues
    cut = ls.truncation_bound
    pos = np.sort(e[e > cut])[::-1]
    neg = np.sort(-e[e < -cut])[::-1]
    rest = e[np.abs(e) <= cut]
    pred = ls.expanded()
    computed = e[np.argsort(-np.abs(e), kind="stable")]
    predicted = np.sort(np.concatenate([pred, -pred]))
    predicted = predicted[np.argsort(-np.abs(predicted), kind="stable")]
    if pos.size != pred.size or neg.size != pred.size:
        return SpectrumMatchReport(False, float("inf"), computed, predicted, tol)
    residual = 0.0
    if pred.size:
        residual = float(max(np.max(np.abs(pos - pred)), np.max(np.abs(neg - pred))))
    if rest.size:
        residual = max(residual, float(np.max(np.abs(rest))) - cut)
    return SpectrumMatchReport(residual <= tol, residual, computed, predicted, tol)


@dataclass(frozen=True)
class ScalingReport:
    passed: bool
    max_deviation: float
    spectra: dict
    tolerance: float = SCALING_TOL

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "top_moduli": {f"{d:g}": [float(x) for x in v] for d, v in self.spectra.items()},
        }


def smatrix_result(s) -> ScatteringResult:
    """Wrap a bare unitary matrix (e.g. a random test matrix) as a result."""
    return ScatteringResult.build(0.0, float("nan"), s, "given", float("nan"))


def check_scaling(phi: SymbolFunction, deltas: Sequence[float], sc: Optional[ScatteringResult] = None,
                  M: int = 64, top: int = 10, tol: float = SCALING_TOL) -> ScalingReport:
    """Spectra of truncations built from ``phi_delta`` must not depend on ``delta``.

    The comparison uses the ``top`` largest eigenvalue moduli.  ``sc`` defaults
    to ``S = diag(-1, 1)``.
    """
    if sc is None:
        sc = smatrix_result(np.diag([-1.0, 1.0]))
    spectra = {}
    for d in deltas:
        if not d > 0:
            raise ValueError("dilation parameters must be positive")
        mot = assemble(hankel_matrix(dilate_symbol(phi, d), M), sc)
        e = np.abs(eigendecompose(mot.matrix, vectors=False).eigenvalues)
        spectra[float(d)] = np.sort(e)[::-1][:top]
    ref = next(iter(spectra.values()))
    dev = max((float(np.max(np.abs(v - ref))) for v in spectra.values()), default=0.0)
    return ScalingReport(dev <= tol, dev, spectra, tol)


def spectrum_check(phi: SymbolFunction, sc: ScatteringResult, M: int = 64,
                tol: float = MATCH_TOL) -> SpectrumMatchReport:
    """Assemble from ``phi`` and ``sc`` and check against the limit set of the same data.

    Both sides use the identical ``M x M`` Hankel matrix (same grid).
    """
    hs = singular_values(phi, M)
    gamma = hankel_matrix(phi, M, p=grid_exponent(2 * M))
    return check_lemma_c1(assemble(gamma, sc), build_sigma0(hs, sc), tol)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
