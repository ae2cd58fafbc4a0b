import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatspec.errors import DimensionMismatchError, NotHermitianError, UnstableThresholdWarning
from scatspec.models import build_lattice_pair, point_masses
from scatspec.spectral import (apply_function, as_hermitian, counting_above, difference_spectrum,
                               eigendecompose)
from scatspec.symbols import SymbolFunction, poisson

from conftest import random_hermitian


def identity_symbol():
    return SymbolFunction(lambda x: np.asarray(x, dtype=float), (1.0, 0.0), "id")


class TestEigendecompose:
    def test_diagonal(self):
        assert np.allclose(eigendecompose(np.diag([2.0, -1.0])).eigenvalues, [-1, 2])

    def test_identity(self):
        assert np.allclose(eigendecompose(np.eye(3)).eigenvalues, [1, 1, 1])

    def test_offdiagonal_pair(self):
        assert np.allclose(eigendecompose([[0, 3], [3, 0]]).eigenvalues, [-3, 3], atol=1e-15)

    def test_rejects_asymmetric(self):
        with pytest.raises(NotHermitianError, match="entry"):
            eigendecompose([[0, 1], [1.1, 0]])

    def test_accepts_roundoff_asymmetry(self):
        a = np.array([[1.0, 2.0], [2.0 + 1e-14, 1.0]])
        out = as_hermitian(a)
        assert np.array_equal(out, out.T)

    def test_rejects_nonsquare(self):
        with pytest.raises(NotHermitianError):
            eigendecompose(np.zeros((2, 3)))

    def test_real_storage_for_zero_imaginary(self):
        assert not np.iscomplexobj(as_hermitian(np.eye(2) + 0j))

    @pytest.mark.parametrize("n", [1, 7, 50, 500])
    @pytest.mark.parametrize("cplx", [False, True])
    def test_residuals(self, rng, n, cplx):
        a = random_hermitian(rng, n, cplx)
        dec = eigendecompose(a)
        norm = np.linalg.norm(a, 2)
        assert np.all(np.diff(dec.eigenvalues) >= 0)
        assert np.linalg.norm(a - dec.reconstruct(), 2) <= 1e-10 * norm
        u = dec.eigenvectors
        assert np.linalg.norm(u.conj().T @ u - np.eye(n), 2) <= 1e-10

    def test_fast_path_matches_complex_path(self, rng):
        a = random_hermitian(rng, 80, complex_=False)
        fast = eigendecompose(a)
        slow = eigendecompose(a, fast_path=False)
        assert not np.iscomplexobj(fast.eigenvectors)
        assert np.iscomplexobj(slow.eigenvectors)
        assert np.max(np.abs(fast.eigenvalues - slow.eigenvalues)) <= 1e-12 * np.linalg.norm(a, 2)
        phi = poisson(1.0)
        f_fast = apply_function(a, phi, fast)
        f_slow = apply_function(a, phi, slow)
        assert np.max(np.abs(f_fast - f_slow)) <= 1e-12


class TestApplyFunction:
    def test_diagonal(self):
        assert np.allclose(apply_function(np.diag([1.0, -1.0]), poisson()), np.diag([0.5, 0.5]))

    def test_zero_matrix(self):
        phi = poisson(2.0)
        assert np.allclose(apply_function(np.zeros((2, 2)), phi), phi(0.0) * np.eye(2))

    def test_swap_matrix(self):
        out = apply_function(np.array([[0.0, 1.0], [1.0, 0.0]]), poisson())
        assert np.allclose(out, 0.5 * np.eye(2), atol=1e-15)

    def test_identity_symbol_recovers_matrix(self, rng):
        a = random_hermitian(rng, 60)
        out = apply_function(a, identity_symbol())
        assert np.linalg.norm(out - a, 2) <= 1e-9 * np.linalg.norm(a, 2)

    def test_commutes(self, rng):
        a = random_hermitian(rng, 60)
        f = apply_function(a, poisson())
        assert np.linalg.norm(a @ f - f @ a, 2) <= 1e-9 * np.linalg.norm(a, 2)
        assert np.array_equal(f, f.conj().T)


class TestCounting:
    def test_examples(self):
        assert counting_above(np.diag([0.3, -0.5, 0.7]), 0.4) == (1, 1)
        assert counting_above(np.zeros((3, 3)), 0.1) == (0, 0)
        assert counting_above(np.diag([0.26, 0.24]), 0.25) == (1, 0)

    def test_nonpositive_threshold(self):
        with pytest.raises(ValueError):
            counting_above(np.eye(2), 0.0)

    def test_unstable_threshold_warns(self):
        with pytest.warns(UnstableThresholdWarning):
            assert counting_above(np.diag([0.5, -0.1]), 0.5 + 1e-12) == (0, 0)

    def test_stable_threshold_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            counting_above(np.diag([0.5, -0.1]), 0.3)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=30),
           st.floats(1e-3, 5), st.floats(1e-3, 5))
    def test_non_increasing(self, vals, s1, s2):
        lo, hi = sorted((s1, s2))
        e = np.array(vals)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnstableThresholdWarning)
            p_lo, m_lo = counting_above(None, lo, eigenvalues=e)
            p_hi, m_hi = counting_above(None, hi, eigenvalues=e)
        assert p_hi <= p_lo <= e.size and m_hi <= m_lo <= e.size


class TestDifferenceSpectrum:
    def test_equal_operators(self, rng):
        h = random_hermitian(rng, 20)
        assert np.max(np.abs(difference_spectrum(h, h, poisson(), 0.5).eigenvalues)) == 0.0

    def test_one_by_one(self):
        e = difference_spectrum(np.diag([0.0]), np.diag([1.0]), poisson(), 1.0).eigenvalues
        assert e == pytest.approx([-0.5], abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            difference_spectrum(np.eye(2), np.eye(3), poisson(), 1.0)

    def test_lattice_extremes(self):
        # limit value (1/4)|s - 1| for c=1 at lambda=0 is 1/(2 sqrt 5)
        h0, h, _ = build_lattice_pair(200, point_masses({0: 1.0}))
        e = difference_spectrum(h0, h, poisson(), 0.1).eigenvalues
        nu = 0.5 / np.sqrt(5)
        assert abs(e[-1] - nu) < 5e-3 and abs(e[0] + nu) < 5e-3

    def test_unitary_invariance(self, rng):
        h0 = random_hermitian(rng, 40)
        h = h0 + np.diag(rng.standard_normal(40))
        q, _ = np.linalg.qr(rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40)))
        e1 = difference_spectrum(h0, h, poisson(), 0.7, 0.3).eigenvalues
        e2 = difference_spectrum(q @ h0 @ q.conj().T, q @ h @ q.conj().T, poisson(), 0.7, 0.3).eigenvalues
        assert np.max(np.abs(e1 - e2)) <= 1e-9

    def test_compactness(self):
        h0, h, _ = build_lattice_pair(400, point_masses({0: 1.0}))
        mods = np.sort(np.abs(difference_spectrum(h0, h, poisson(), 0.1).eigenvalues))[::-1]
        assert mods[49] < 0.1 * mods[0]
