import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatspec.errors import PotentialError
from scatspec.models import (LatticeModel, build_continuum_pair, build_lattice_pair, dilate_symbol,
                             factorize, gaussian_potential, point_masses, potential_from_descriptor,
                             sampled_function, square_well)
from scatspec.spectral import difference_spectrum, eigendecompose
from scatspec.symbols import gaussian, poisson


def tridiag(n, d, o):
    return np.diag(np.full(n, d)) + np.diag(np.full(n - 1, o), 1) + np.diag(np.full(n - 1, o), -1)


class TestLattice:
    def test_empty_potential(self):
        h0, h, fact = build_lattice_pair(2, point_masses({}))
        assert np.array_equal(h0, tridiag(5, 0.0, 1.0))
        assert np.array_equal(h, h0)
        assert not np.any(fact.g)

    def test_single_site(self):
        h0, h, _ = build_lattice_pair(2, point_masses({0: 1.0}))
        assert np.array_equal(h - h0, np.diag([0, 0, 1.0, 0, 0]))

    def test_dirichlet_spectrum(self):
        L = 200
        h0, _, _ = build_lattice_pair(L, point_masses({0: 1.0}))
        j = np.arange(1, 2 * L + 2)
        exact = np.sort(2 * np.cos(j * np.pi / (2 * L + 2)))
        assert np.max(np.abs(eigendecompose(h0, vectors=False).eigenvalues - exact)) <= 1e-12

    def test_site_too_far(self):
        with pytest.raises(PotentialError, match="L >= 12"):
            build_lattice_pair(10, point_masses({3: 1.0}))

    def test_rejects_sampled(self):
        with pytest.raises(PotentialError):
            LatticeModel(10, gaussian_potential())

    def test_duplicate_sites_accumulate(self):
        assert point_masses([(1, 0.5), (1, 0.25)]).sites() == {1: 0.75}

    def test_exact_factorization_for_square_values(self):
        _, _, fact = build_lattice_pair(8, point_masses({0: 1.0, 1: -0.25, -2: 4.0}))
        h0, h, _ = build_lattice_pair(8, point_masses({0: 1.0, 1: -0.25, -2: 4.0}))
        assert np.array_equal(fact.G @ fact.V0 @ fact.G, h - h0)

    @settings(max_examples=50, deadline=None)
    @given(st.dictionaries(st.integers(-3, 3), st.floats(-5, 5, allow_nan=False), max_size=5))
    def test_difference_is_factorized_potential(self, sites):
        h0, h, fact = build_lattice_pair(12, point_masses(sites))
        d = h - h0
        assert np.array_equal(d, np.diag(np.diag(d)))
        assert np.all(fact.g >= 0)
        # exact for squares of doubles, one ulp otherwise
        assert np.allclose(fact.G @ fact.V0 @ fact.G, d, rtol=2.3e-16, atol=0)
        e = eigendecompose(h0, vectors=False).eigenvalues
        assert e.min() >= -2 and e.max() <= 2

    def test_truncation_stability(self):
        pot, phi = point_masses({0: 1.0}), poisson()
        tops = []
        for L in (400, 800):
            h0, h, _ = build_lattice_pair(L, pot)
            e = difference_spectrum(h0, h, phi, 0.1).eigenvalues
            tops.append(np.sort(e[np.argsort(-np.abs(e))[:10]]))
        assert np.max(np.abs(tops[0] - tops[1])) < 1e-3


class TestContinuum:
    def test_zero_potential(self):
        h0, h, _ = build_continuum_pair(5.0, 99, sampled_function(lambda x: 0 * x))
        assert np.array_equal(h0, h)

    def test_stencil(self):
        h0, _, _ = build_continuum_pair(2.0, 3, sampled_function(lambda x: 0 * x))
        assert np.array_equal(h0, tridiag(3, 2.0, -1.0))

    def test_lowest_eigenvalue(self):
        X = 60.0
        h0, h, _ = build_continuum_pair(X, 1200, gaussian_potential(1.0, 1.0))
        e = eigendecompose(h0, vectors=False).eigenvalues[0]
        assert e == pytest.approx((np.pi / (2 * X)) ** 2, rel=1e-2)

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_second_order_convergence(self, j):
        X, V = 5.0, sampled_function(lambda x: 0 * x)
        exact = (j * np.pi / (2 * X)) ** 2
        errs = []
        for n in (49, 99):  # h halves exactly: 2X/(n+1)
            e = eigendecompose(build_continuum_pair(X, n, V)[0], vectors=False).eigenvalues
            errs.append(abs(e[j - 1] - exact))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)

    def test_decay_violation(self):
        V = sampled_function(lambda x: 1.0 / (1 + np.abs(x)), decay=(1.0, 2.0))
        with pytest.raises(PotentialError, match="decay check"):
            build_continuum_pair(10.0, 99, V)

    def test_decay_exponent_must_exceed_one(self):
        with pytest.raises(PotentialError):
            sampled_function(lambda x: 0 * x, decay=(1.0, 1.0))

    def test_sample_decay_checked_at_construction(self):
        with pytest.raises(PotentialError):
            sampled_function(samples=[(3.0, 1.0)], decay=(1.0, 2.0))

    def test_square_well_values(self):
        V = square_well(0.5, 1.0)
        assert np.array_equal(V(np.array([-2.0, -1.0, 0.0, 1.0, 1.5])), [0, -0.5, -0.5, -0.5, 0])


class TestDescriptors:
    def test_point_masses(self):
        assert potential_from_descriptor({"kind": "point-masses", "sites": [[0, 1.0]]}).sites() == {0: 1.0}

    def test_sampled(self):
        V = potential_from_descriptor({"kind": "sampled-function", "samples": [[-1, 0.1], [1, 0.1]]})
        assert V(0.0) == pytest.approx(0.1)
        assert V(5.0) == 0.0

    def test_unknown(self):
        with pytest.raises(PotentialError):
            potential_from_descriptor({"kind": "nope"})


class TestDilate:
    def test_identity(self):
        phi = poisson()
        assert dilate_symbol(phi, 1.0) is phi

    def test_half(self):
        assert dilate_symbol(poisson(), 0.5)(1.0) == pytest.approx(0.2)

    @pytest.mark.parametrize("phi", [poisson(), gaussian(1.5)])
    def test_double(self, phi):
        assert dilate_symbol(phi, 2.0)(2.0) == pytest.approx(phi(1.0))

    @pytest.mark.parametrize("d", [0.0, -1.0])
    def test_rejects_nonpositive(self, d):
        with pytest.raises(ValueError):
            dilate_symbol(poisson(), d)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.05, 20), st.floats(-1e3, 1e3))
    def test_decay_bound_rescaled(self, d, x):
        phi = dilate_symbol(poisson(), d)
        c, rho = phi.decay_bound
        assert abs(phi(x)) <= c * (1 + abs(x)) ** (-rho) * (1 + 1e-12)


def test_factorize_signs():
    f = factorize([2.0, 0.0, -3.0])
    assert np.array_equal(f.v0, [1, 0, -1])
    assert np.allclose(f.potential(), np.diag([2.0, 0.0, -3.0]), rtol=1e-15)
