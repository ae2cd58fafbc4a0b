"""Hot propagation loops, compiled when available.

The Cython extension ``_ckernels`` is preferred; the pure-Python module is used
when the extension was not built or when ``SCATSPEC_PURE_PYTHON=1`` is set.
"""
import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("SCATSPEC_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

__all__ = ["BACKEND", "transfer_product", "rk4_propagate", "python_kernels"]


def transfer_product(lam, v, impl=None):
    impl = impl or _impl
    v = np.ascontiguousarray(v, dtype=np.float64)
    return np.array(impl.transfer_product(float(lam), v)).reshape(2, 2)


def rk4_propagate(lam, h, v_start, v_mid, v_end, impl=None):
    impl = impl or _impl
    arrays = [np.ascontiguousarray(a, dtype=np.float64) for a in (v_start, v_mid, v_end)]
    return np.array(impl.rk4_propagate(float(lam), float(h), *arrays)).reshape(2, 2)


python_kernels = _pykernels
compiled_kernels = _impl if BACKEND == "cython" else None
