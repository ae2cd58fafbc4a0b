import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatspec.errors import HankelConvergenceError
from scatspec.hankel import (cayley_preimage, cayley_transfer, hankel_matrix, rank_one_oracle,
                             singular_values)
from scatspec.symbols import dilate_symbol, gaussian, poisson, rational, sampled, scale_symbol, zero

# 1/(1+x^2)^2 in circle coordinates is (1-z)^4 / (16 z^2); its analytic-part
# coefficients give the exact 2x2 Hankel matrix [[-1/4, 1/16], [1/16, 0]].
SQUARED_POISSON = rational([1.0], [1.0, 0.0, 2.0, 0.0, 1.0])
SQUARED_POISSON_SV = np.sort(np.abs(np.linalg.eigvalsh(np.array([[-0.25, 0.0625], [0.0625, 0.0]]))))[::-1]

TEST_SYMBOLS = [poisson(1.0), gaussian(1.0), rational([1.0], [1.0, 0.0, 0.0, 0.0, 1.0]), SQUARED_POISSON]


class TestCayley:
    def test_zero_symbol(self):
        assert not np.any(cayley_transfer(zero(), 8).samples)

    def test_origin_maps_to_one(self):
        c = cayley_transfer(poisson(), 8)
        j = 2**8 // 2  # theta = pi  <->  x = 0
        assert cayley_preimage(np.pi) == pytest.approx(0.0, abs=1e-15)
        assert c.samples[j] == pytest.approx(1.0, abs=1e-15)

    def test_real_samples_and_infinity(self):
        c = cayley_transfer(gaussian(2.0), 10)
        assert c.samples.dtype.kind == "f"
        assert c.value_at_one == 0.0

    @pytest.mark.parametrize("p", [5, 17])
    def test_grid_range(self, p):
        with pytest.raises(ValueError):
            cayley_transfer(poisson(), p)

    def test_preimage_orientation(self):
        theta = np.linspace(0.1, 6.0, 7)
        x = cayley_preimage(theta)
        assert np.allclose((x - 1j) / (x + 1j), np.exp(1j * theta))


class TestSingularValues:
    def test_rank_one_matrix(self):
        g = hankel_matrix(poisson(), 6)
        expected = np.zeros((6, 6))
        expected[0, 0] = -0.25
        assert np.max(np.abs(g - expected)) < 1e-15

    def test_rank_one_value(self):
        hs = singular_values(poisson(), 64)
        assert hs.singular_values[0] == pytest.approx(0.25, abs=1e-12)
        assert hs.singular_values[1] <= 1e-8
        assert hs.tail_bound <= 1e-8

    def test_zero_symbol(self):
        hs = singular_values(zero(), 16)
        assert not np.any(hs.singular_values) and hs.tail_bound == 0.0

    def test_scaled_poisson(self):
        assert singular_values(scale_symbol(poisson(), 2.0), 32).top == pytest.approx(0.5, abs=1e-12)

    def test_squared_poisson_exact(self):
        sv = singular_values(SQUARED_POISSON, 64).singular_values
        assert np.max(np.abs(sv[:2] - SQUARED_POISSON_SV)) <= 1e-12
        assert sv[2] <= 1e-12

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    def test_rank_one_oracle(self, a):
        oracle = rank_one_oracle(a)
        assert oracle.analytic and list(oracle.singular_values) == [0.25]
        hs = singular_values(poisson(a), 64)
        assert hs.top == pytest.approx(oracle.top, abs=1e-9)
        assert hs.singular_values[1] <= 1e-8

    def test_oracle_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            rank_one_oracle(0.0)

    @pytest.mark.parametrize("phi", TEST_SYMBOLS, ids=lambda p: p.label)
    @pytest.mark.parametrize("delta", [0.5, 2.0])
    def test_dilation_invariance(self, phi, delta):
        a = singular_values(phi, 64).singular_values[:10]
        b = singular_values(dilate_symbol(phi, delta), 64).singular_values[:10]
        assert np.max(np.abs(a - b)) <= 1e-6

    @pytest.mark.parametrize("phi", TEST_SYMBOLS, ids=lambda p: p.label)
    def test_monotone_truncation(self, phi):
        p = 12
        small = singular_values(phi, 32, p=p).singular_values
        large = singular_values(phi, 64, p=p).singular_values
        assert np.all(small <= large[:32] + 1e-9)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3))
    def test_linearity(self, c):
        phi = gaussian(1.3)
        base = singular_values(phi, 32).singular_values
        scaled = singular_values(scale_symbol(phi, c), 32).singular_values
        assert np.max(np.abs(scaled - abs(c) * base)) <= 1e-8

    def test_compact_decay(self):
        sv = singular_values(rational([1.0], [1.0, 0.0, 0.0, 0.0, 1.0]), 64).singular_values
        assert sv[19] / sv[0] < 1e-6

    def test_sorted_nonnegative(self):
        sv = singular_values(gaussian(0.8), 64).singular_values
        assert np.all(sv >= 0) and np.all(np.diff(sv) <= 0)

    def test_convergence_failure_carries_values(self):
        tent = sampled([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
        with pytest.raises(HankelConvergenceError, match="increase M") as info:
            singular_values(tent, 8)
        assert len(info.value.values_m) == 8 and len(info.value.values_2m) == 16

    def test_truncation_must_fit_grid(self):
        with pytest.raises(ValueError):
            singular_values(poisson(), 64, p=8)
