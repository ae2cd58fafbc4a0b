"""Spectra of ``phi_delta(H - lambda) - phi_delta(H0 - lambda)`` and their scattering limit.

Submodules
----------
spectral        dense Hermitian eigen-decomposition, matrix functions, counting
symbols         symbols phi and their dilations
models          lattice and finite-difference Schroedinger pairs
scattering      S-matrices (transfer, stationary, continuum) and trace checks
hankel          Hankel singular values through the Cayley transform
limitset        predicted limit set and its counting function
model_operator  truncated model operator and its spectral identities
verify          delta sweeps, reports, CLI support
"""
from ._kernels import BACKEND as KERNEL_BACKEND
from .hankel import HankelSpectrum, rank_one_oracle, singular_values
from .limitset import N0, LimitSet, build_sigma0, multiplicity, safe_thresholds
from .models import (LatticeModel, PotentialSpec, build_continuum_pair, build_lattice_pair,
                     point_masses)
from .scattering import (ScatteringResult, continuum_smatrix, stationary_smatrix,
                         transfer_smatrix)
from .spectral import apply_function, counting_above, difference_spectrum, eigendecompose
from .symbols import SymbolFunction, dilate_symbol, poisson
from .verify import ExperimentConfig, run_sweep

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "HankelSpectrum",
    "rank_one_oracle",
    "singular_values",
    "N0",
    "LimitSet",
    "build_sigma0",
    "multiplicity",
    "safe_thresholds",
    "LatticeModel",
    "PotentialSpec",
    "build_continuum_pair",
    "build_lattice_pair",
    "point_masses",
    "ScatteringResult",
    "continuum_smatrix",
    "stationary_smatrix",
    "transfer_smatrix",
    "apply_function",
    "counting_above",
    "difference_spectrum",
    "eigendecompose",
    "SymbolFunction",
    "dilate_symbol",
    "poisson",
    "ExperimentConfig",
    "run_sweep",
]
