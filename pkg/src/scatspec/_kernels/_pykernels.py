"""Pure-Python reference implementations of the propagation kernels."""


def transfer_product(lam, v):
    """Product ``T[n-1] @ ... @ T[0]`` of one-site lattice transfer matrices.

    ``T[i] = [[lam - v[i], -1], [1, 0]]`` maps ``(u(n), u(n-1))`` to
    ``(u(n+1), u(n))`` for the recursion ``u(n+1) + u(n-1) + v(n) u(n) = lam u(n)``.
    """
    a00, a01, a10, a11 = 1.0, 0.0, 0.0, 1.0
    for vi in v:
        d = lam - float(vi)
        a00, a01, a10, a11 = d * a00 - a10, d * a01 - a11, a00, a01
    return a00, a01, a10, a11


def rk4_propagate(lam, h, v_start, v_mid, v_end):
    """Classical RK4 for the fundamental matrix of ``-u'' + V u = lam u``.

    The system is ``y' = [[0, 1], [V - lam, 0]] y`` with ``y = (u, u')``.
    Step ``j`` uses the potential values at its start, midpoint and end.
    """
    y00, y01, y10, y11 = 1.0, 0.0, 0.0, 1.0
    hh = 0.5 * h
    h6 = h / 6.0
    for vs, vm, ve in zip(v_start, v_mid, v_end):
        q0 = float(vs) - lam
        qm = float(vm) - lam
        q1 = float(ve) - lam
        k1 = (y10, y11, q0 * y00, q0 * y01)
        k2 = (y10 + hh * k1[2], y11 + hh * k1[3],
              qm * (y00 + hh * k1[0]), qm * (y01 + hh * k1[1]))
        k3 = (y10 + hh * k2[2], y11 + hh * k2[3],
              qm * (y00 + hh * k2[0]), qm * (y01 + hh * k2[1]))
        k4 = (y10 + h * k3[2], y11 + h * k3[3],
              q1 * (y00 + h * k3[0]), q1 * (y01 + h * k3[1]))
        y00 += h6 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y01 += h6 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        y10 += h6 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        y11 += h6 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    return y00, y01, y10, y11
