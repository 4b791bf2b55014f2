"""Truncated Taylor arithmetic, vectorized over evaluation points.

A :class:`Jet` of order ``d`` holds normalized Taylor coefficients
``c[k] = f^(k)(x) / k!`` for ``k = 0..d`` in an array of shape ``(d + 1, m)``,
one column per evaluation point.  Arithmetic follows the usual recurrences
(Cauchy product, quotient, exp/log/power and sinh/cosh ODE recurrences), so
derivatives are carried exactly up to rounding and never by differencing.
"""

from math import factorial

import numpy as np

__all__ = ["Jet", "compose", "invert_series"]


def _coerce(c):
    c = np.asarray(c, dtype=float)
    if c.ndim == 1:
        c = c[:, None]
    return c


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 1000

    def __init__(self, coeffs):
        self.c = _coerce(coeffs)

    # -- construction -------------------------------------------------
    @classmethod
    def variable(cls, x, order):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        c = np.zeros((order + 1, x.size))
        c[0] = x
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order, size=None):
        value = np.atleast_1d(np.asarray(value, dtype=float))
        size = value.size if size is None else size
        c = np.zeros((order + 1, size))
        c[0] = value
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs):
        derivs = _coerce(derivs)
        scale = np.array([1.0 / factorial(k) for k in range(derivs.shape[0])])
        return cls(derivs * scale[:, None])

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivatives(self):
        scale = np.array([float(factorial(k)) for k in range(self.order + 1)])
        return self.c * scale[:, None]

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.c[: order + 1])

    def copy(self):
        return Jet(self.c.copy())

    # -- calculus -----------------------------------------------------
    def deriv(self):
        """Jet of the derivative; the order drops by one."""
        k = np.arange(1, self.order + 1, dtype=float)
        return Jet(self.c[1:] * k[:, None])

    def integ(self, const):
        """Jet of an antiderivative with value ``const``; the order rises by one."""
        k = np.arange(1, self.order + 2, dtype=float)
        c = np.empty((self.order + 2, self.c.shape[1]))
        c[0] = const
        c[1:] = self.c / k[:, None]
        return Jet(c)

    # -- arithmetic ---------------------------------------------------
    def _match(self, other):
        if isinstance(other, Jet):
            d = min(self.order, other.order)
            return self.c[: d + 1], other.c[: d + 1]
        out = np.zeros_like(self.c)
        out[0] = other
        return self.c, out

    def __add__(self, other):
        a, b = self._match(other)
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._match(other)
        return Jet(a - b)

    def __rsub__(self, other):
        a, b = self._match(other)
        return Jet(b - a)

    def __neg__(self):
        return Jet(-self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        a, b = self._match(other)
        d = a.shape[0] - 1
        out = np.zeros_like(a)
        for k in range(d + 1):
            out[k] = np.einsum("ij,ij->j", a[: k + 1], b[k::-1])
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        a, b = self._match(other)
        d = a.shape[0] - 1
        out = np.zeros_like(a)
        for k in range(d + 1):
            acc = a[k] - np.einsum("ij,ij->j", out[:k], b[k:0:-1]) if k else a[0]
            out[k] = acc / b[0]
        return Jet(out)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.order, self.c.shape[1]) / self

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            return self._ipow(int(p))
        return self.power(p)

    def _ipow(self, p):
        result = Jet.constant(1.0, self.order, self.c.shape[1])
        base = self
        while p:
            if p & 1:
                result = result * base
            p >>= 1
            if p:
                base = base * base
        return result

    def power(self, p):
        """Real power; requires a nonzero leading coefficient."""
        a = self.c
        d = self.order
        out = np.zeros_like(a)
        out[0] = a[0] ** p
        for k in range(1, d + 1):
            j = np.arange(1, k + 1, dtype=float)
            w = ((p + 1.0) * j - k)[:, None]
            out[k] = np.sum(w * a[1 : k + 1] * out[k - 1 :: -1][:k], axis=0) / (k * a[0])
        return Jet(out)

    def exp(self):
        a = self.c
        out = np.zeros_like(a)
        out[0] = np.exp(a[0])
        for k in range(1, self.order + 1):
            j = np.arange(1, k + 1, dtype=float)[:, None]
            out[k] = np.sum(j * a[1 : k + 1] * out[k - 1 :: -1][:k], axis=0) / k
        return Jet(out)

    def log(self):
        a = self.c
        out = np.zeros_like(a)
        out[0] = np.log(a[0])
        for k in range(1, self.order + 1):
            j = np.arange(1, k, dtype=float)[:, None]
            s = np.sum(j * out[1:k] * a[k - 1 : 0 : -1], axis=0) if k > 1 else 0.0
            out[k] = (a[k] - s / k) / a[0]
        return Jet(out)

    def sinh_cosh(self):
        a = self.c
        s = np.zeros_like(a)
        ch = np.zeros_like(a)
        s[0], ch[0] = np.sinh(a[0]), np.cosh(a[0])
        for k in range(1, self.order + 1):
            j = np.arange(1, k + 1, dtype=float)[:, None]
            ja = j * a[1 : k + 1]
            s[k] = np.sum(ja * ch[k - 1 :: -1][:k], axis=0) / k
            ch[k] = np.sum(ja * s[k - 1 :: -1][:k], axis=0) / k
        return Jet(s), Jet(ch)

    def __repr__(self):
        return f"Jet(order={self.order}, points={self.c.shape[1]})"


def compose(outer, inner):
    """Taylor coefficients of ``f(x0 + s(h))`` where ``outer`` holds those of
    ``f`` at ``x0`` and ``inner`` is a jet ``s`` with zero constant term."""
    outer = _coerce(outer)
    d = min(outer.shape[0] - 1, inner.order)
    shift = Jet(inner.c[: d + 1].copy())
    shift.c[0] = 0.0
    acc = Jet.constant(outer[d], d, shift.c.shape[1])
    for k in range(d - 1, -1, -1):
        acc = acc * shift + outer[k]
    return acc


def invert_series(g):
    """Given the jet of ``y = G(x0 + h)``, return the jet of ``h`` as a function
    of ``s = y - G(x0)`` (series reversion); requires ``G'(x0) != 0``."""
    d = g.order
    g1 = g.c[1]
    s = Jet.variable(np.zeros(g.c.shape[1]), d)
    h = s / g1
    higher = Jet(g.c.copy())
    higher.c[0] = 0.0
    higher.c[1] = 0.0
    for _ in range(d):
        h = (s - compose(higher.c, h)) / g1
    return h
