import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatspec import _kernels
from scatspec._kernels import compiled_kernels, python_kernels, rk4_propagate, transfer_product

needs_compiled = pytest.mark.skipif(compiled_kernels is None, reason="compiled kernels not built")


def transfer_reference(lam, v):
    m = np.eye(2)
    for vn in v:
        m = np.array([[lam - vn, -1.0], [1.0, 0.0]]) @ m
    return m


def test_transfer_single_site():
    assert np.array_equal(transfer_product(0.5, [0.25]), [[0.25, -1.0], [1.0, 0.0]])


@settings(max_examples=40, deadline=None)
@given(st.floats(-1.99, 1.99), st.lists(st.floats(-3, 3), min_size=1, max_size=40))
def test_transfer_matches_matrix_product(lam, v):
    for impl in (python_kernels, compiled_kernels):
        if impl is None:
            continue
        got = transfer_product(lam, v, impl=impl)
        assert np.allclose(got, transfer_reference(lam, v), rtol=1e-12, atol=1e-12 * np.abs(got).max())


def test_transfer_determinant_is_one(rng):
    v = 0.3 * rng.standard_normal(20)
    assert np.linalg.det(transfer_product(0.3, v)) == pytest.approx(1.0, rel=1e-8)


def test_rk4_free_propagation():
    # y'' = -k^2 y: exact propagator is a rotation
    k, h, n = 1.3, 1e-3, 1000
    z = np.zeros(n)
    m = rk4_propagate(k * k, h, z, z, z)
    L = h * n
    exact = np.array([[np.cos(k * L), np.sin(k * L) / k], [-k * np.sin(k * L), np.cos(k * L)]])
    assert np.max(np.abs(m - exact)) < 1e-11


@needs_compiled
@settings(max_examples=20, deadline=None)
@given(st.floats(0.06, 4), st.lists(st.floats(-2, 2), min_size=3, max_size=60))
def test_rk4_backends_agree(lam, v):
    v = np.asarray(v)
    a = rk4_propagate(lam, 0.01, v, v * 0.9, v * 0.8, impl=python_kernels)
    b = rk4_propagate(lam, 0.01, v, v * 0.9, v * 0.8, impl=compiled_kernels)
    assert np.max(np.abs(a - b)) <= 1e-13 * max(1.0, np.abs(a).max())


def test_backend_name():
    assert _kernels.BACKEND in ("cython", "python")


def test_env_var_forces_python():
    env = {**os.environ, "SCATSPEC_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", "import scatspec._kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
