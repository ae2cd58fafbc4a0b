# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the sequential 2x2 propagation loops.

Both kernels return the four entries ``(a00, a01, a10, a11)`` of a real 2x2
matrix; see ``_pykernels`` for the reference semantics.
"""


def transfer_product(double lam, const double[::1] v):
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double a00 = 1.0, a01 = 0.0, a10 = 0.0, a11 = 1.0
    cdef double d, b00, b01
    for i in range(n):
        d = lam - v[i]
        # [[d, -1], [1, 0]] @ acc
        b00 = d * a00 - a10
        b01 = d * a01 - a11
        a10 = a00
        a11 = a01
        a00 = b00
        a01 = b01
    return a00, a01, a10, a11


def rk4_propagate(double lam, double h,
                  const double[::1] v_start,
                  const double[::1] v_mid,
                  const double[::1] v_end):
    cdef Py_ssize_t j, n = v_start.shape[0]
    # fundamental matrix Y of y' = [[0, 1], [V - lam, 0]] y
    cdef double y00 = 1.0, y01 = 0.0, y10 = 0.0, y11 = 1.0
    cdef double q0, qm, q1, hh = 0.5 * h, h6 = h / 6.0
    cdef double k1_00, k1_01, k1_10, k1_11
    cdef double k2_00, k2_01, k2_10, k2_11
    cdef double k3_00, k3_01, k3_10, k3_11
    cdef double k4_00, k4_01, k4_10, k4_11
    for j in range(n):
        q0 = v_start[j] - lam
        qm = v_mid[j] - lam
        q1 = v_end[j] - lam
        k1_00 = y10
        k1_01 = y11
        k1_10 = q0 * y00
        k1_11 = q0 * y01
        k2_00 = y10 + hh * k1_10
        k2_01 = y11 + hh * k1_11
        k2_10 = qm * (y00 + hh * k1_00)
        k2_11 = qm * (y01 + hh * k1_01)
        k3_00 = y10 + hh * k2_10
        k3_01 = y11 + hh * k2_11
        k3_10 = qm * (y00 + hh * k2_00)
        k3_11 = qm * (y01 + hh * k2_01)
        k4_00 = y10 + h * k3_10
        k4_01 = y11 + h * k3_11
        k4_10 = q1 * (y00 + h * k3_00)
        k4_11 = q1 * (y01 + h * k3_01)
        y00 += h6 * (k1_00 + 2.0 * k2_00 + 2.0 * k3_00 + k4_00)
        y01 += h6 * (k1_01 + 2.0 * k2_01 + 2.0 * k3_01 + k4_01)
        y10 += h6 * (k1_10 + 2.0 * k2_10 + 2.0 * k3_10 + k4_10)
        y11 += h6 * (k1_11 + 2.0 * k2_11 + 2.0 * k3_11 + k4_11)
    return y00, y01, y10, y11
