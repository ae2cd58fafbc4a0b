"""Symbols: real functions on the line that vanish at infinity.

A :class:`SymbolFunction` bundles a vectorised evaluator with a decay bound
``|phi(x)| <= C (1 + |x|)**(-rho)`` and an optional derivative.  The factory
functions below cover the families used by the experiment configs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "SymbolFunction",
    "poisson",
    "rational",
    "gaussian",
    "sampled",
    "zero",
    "scale_symbol",
    "dilate_symbol",
    "symbol_from_descriptor",
]


@dataclass(frozen=True)
class SymbolFunction:
    """A real symbol ``phi`` in C_0(R).

    Parameters
    ----------
    eval : callable
        Vectorised map ``x -> phi(x)``; must accept numpy arrays.
    decay_bound : (float, float)
        Constants ``(C, rho)`` with ``|phi(x)| <= C (1 + |x|)**(-rho)``.
    label : str
        Identifier used in reports.
    deriv : callable, optional
        Vectorised ``phi'``.  When absent, :meth:`derivative` falls back to a
        five-point central difference.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    decay_bound: tuple[float, float]
    label: str
    deriv: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    def derivative(self, x, step=1e-3):
        x = np.asarray(x, dtype=float)
        if self.deriv is not None:
            return self.deriv(x)
        h = step * np.maximum(1.0, np.abs(x))
        f = self.eval
        return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def _sup_weighted(f, rho, span=1e4, num=200001):
    # crude sup of |f| (1+|x|)^rho on a log-spaced symmetric grid
    t = np.concatenate([[0.0], np.geomspace(1e-4, span, num // 2)])
    x = np.concatenate([-t[::-1], t])
    return float(np.max(np.abs(f(x)) * (1.0 + np.abs(x)) ** rho))


def poisson(a: float = 1.0) -> SymbolFunction:
    """``phi(x) = 1 / (1 + (x/a)**2)``; its Hankel operator has rank one."""
    if a <= 0:
        raise ValueError("Poisson width must be positive")
    a = float(a)

    def f(x):
        return 1.0 / (1.0 + (x / a) ** 2)

    def df(x):
        return -2.0 * x / a**2 / (1.0 + (x / a) ** 2) ** 2

    return SymbolFunction(f, (2.0 * max(1.0, a) ** 2, 2.0), f"poisson(a={a:g})", df)


def rational(num: Sequence[float], den: Sequence[float]) -> SymbolFunction:
    """Real rational symbol ``P(x)/Q(x)``, coefficients highest degree first.

    ``Q`` must have no real zeros and ``deg P < deg Q``.
    """
    p = np.poly1d(np.asarray(num, dtype=float))
    q = np.poly1d(np.asarray(den, dtype=float))
    if q.order <= p.order:
        raise ValueError("rational symbol must vanish at infinity (deg num < deg den)")
    roots = q.roots
    if np.any(np.abs(np.imag(roots)) < 1e-12):
        raise ValueError("denominator has a real zero")
    dp, dq = p.deriv(), q.deriv()

    def f(x):
        return p(x) / q(x)

    def df(x):
        qx = q(x)
        return (dp(x) * qx - p(x) * dq(x)) / qx**2

    rho = float(q.order - p.order)
    c = 1.05 * _sup_weighted(f, rho)
    label = f"rational(num={list(map(float, num))}, den={list(map(float, den))})"
    return SymbolFunction(f, (c, rho), label, df)


def gaussian(width: float = 1.0, amplitude: float = 1.0) -> SymbolFunction:
    """``amplitude * exp(-(x/width)**2)``; decay bound stated with ``rho = 2``."""
    w, amp = float(width), float(amplitude)

    def f(x):
        return amp * np.exp(-((x / w) ** 2))

    def df(x):
        return -2.0 * x / w**2 * f(x)

    c = 1.05 * _sup_weighted(f, 2.0, span=50 * w)
    return SymbolFunction(f, (c, 2.0), f"gaussian(width={w:g}, amplitude={amp:g})", df)


def sampled(xs: Sequence[float], ys: Sequence[float]) -> SymbolFunction:
    """Piecewise-linear interpolant of a table, zero outside its range."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise ValueError("sampled symbol needs matching 1-D tables of length >= 2")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("sample abscissae must be strictly increasing")

    def f(x):
        return np.interp(x, xs, ys, left=0.0, right=0.0)

    # compact support: any rho works, take rho = 2
    c = 1.05 * float(np.max(np.abs(ys) * (1.0 + np.abs(xs)) ** 2)) if ys.any() else 0.0
    return SymbolFunction(f, (c, 2.0), f"sampled(n={xs.size})")


def zero() -> SymbolFunction:
    return SymbolFunction(lambda x: np.zeros_like(np.asarray(x, dtype=float)), (0.0, 2.0), "zero",
                          lambda x: np.zeros_like(np.asarray(x, dtype=float)))


def scale_symbol(phi: SymbolFunction, c: float) -> SymbolFunction:
    """``c * phi``."""
    c = float(c)
    d = phi.deriv
    return SymbolFunction(
        lambda x: c * phi.eval(x),
        (abs(c) * phi.decay_bound[0], phi.decay_bound[1]),
        f"{c:g}*{phi.label}",
        (lambda x: c * d(x)) if d is not None else None,
    )


def dilate_symbol(phi: SymbolFunction, delta: float) -> SymbolFunction:
    """Return ``phi_delta(x) = phi(x / delta)``.

    The decay constant becomes ``C * max(1, delta)**rho``, since
    ``1 + |x|/delta >= min(1, 1/delta) (1 + |x|)``.
    """
    if not delta > 0:
        raise ValueError(f"dilation parameter must be positive, got {delta}")
    if delta == 1.0:
        return phi
    delta = float(delta)
    c, rho = phi.decay_bound
    d = phi.deriv
    return SymbolFunction(
        lambda x: phi.eval(np.asarray(x, dtype=float) / delta),
        (c * max(1.0, delta) ** rho, rho),
        f"{phi.label}@delta={delta:g}",
        (lambda x: d(np.asarray(x, dtype=float) / delta) / delta) if d is not None else None,
    )


def symbol_from_descriptor(desc: dict) -> SymbolFunction:
    """Build a symbol from a JSON config descriptor.

    Recognised kinds: ``poisson`` (``a``), ``rational`` (``num``, ``den``),
    ``gaussian`` (``width``, ``amplitude``), ``sampled`` (``x``, ``y``),
    ``zero``.  An optional ``scale`` multiplies the result.
    """
    kind = desc.get("kind")
    if kind == "poisson":
        phi = poisson(desc.get("a", 1.0))
    elif kind == "rational":
        phi = rational(desc["num"], desc["den"])
    elif kind == "gaussian":
        phi = gaussian(desc.get("width", 1.0), desc.get("amplitude", 1.0))
    elif kind == "sampled":
        phi = sampled(desc["x"], desc["y"])
    elif kind == "zero":
        phi = zero()
    else:
        raise ValueError(f"unknown symbol kind {kind!r}")
    if "scale" in desc:
        phi = scale_symbol(phi, desc["scale"])
    return phi
