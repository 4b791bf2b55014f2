"""Radial functions on H^N carried as Taylor jets, and the radial operators.

A :class:`RadialJetFunction` knows its value and derivatives at any radius,
its support ``(a, b)`` and the radii (breakpoints) where its smoothness drops.
The operators

    grad_r u   = u'
    laplace_r u = u'' + (N - 1) coth(r) u'
    nabla_r_k  = laplace_r^(k/2)            (k even)
               = grad_r laplace_r^((k-1)/2) (k odd)

act on jets, so iterated operators are exact up to rounding; no numerical
differentiation is involved.
"""

import math

import numpy as np

from . import hypgeom
from .jets import Jet

__all__ = [
    "RadialJetFunction",
    "coth_jet",
    "grad_r",
    "laplace_r",
    "nabla_r_k",
    "product",
    "square_identity_check",
    "smooth_bump",
    "poly_bump",
    "gaussian_window",
    "random_poly_bump",
    "piecewise",
    "test_function_library",
    "default_library",
]

SMOOTH = math.inf


class RadialJetFunction:
    """A radial function with analytic derivative jets.

    ``taylor(r, order)`` must return a :class:`Jet` of the given order at the
    points ``r`` (a 1-D array strictly inside the support, or at ``r = 0``
    when the support starts at the pole).  ``smoothness`` is the largest ``k``
    for which the function is globally ``C^k``; between breakpoints it is
    always analytic.
    """

    def __init__(self, taylor, support, breakpoints=(), name="u", smoothness=SMOOTH):
        a, b = float(support[0]), float(support[1])
        if not (0.0 <= a < b):
            raise ValueError(f"invalid support ({a}, {b})")
        self._taylor = taylor
        self.support = (a, b)
        self.breakpoints = tuple(sorted(float(x) for x in breakpoints if a < x < b))
        self.name = name
        self.smoothness = smoothness

    def _inside(self, r):
        a, b = self.support
        return ((r > a) & (r < b)) | ((r == a) & (a == 0.0))

    def taylor(self, r, order):
        """Normalized Taylor coefficients, shape ``(order + 1, len(r))``; zero outside the support."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros((order + 1, r.size))
        mask = self._inside(r)
        if np.any(mask):
            out[:, mask] = self._taylor(r[mask], order).c
        return Jet(out)

    def eval_jet(self, r, order):
        """``[u(r), u'(r), ..., u^(order)(r)]``; columns index the points for array input."""
        scalar = np.ndim(r) == 0
        d = self.taylor(r, order).derivatives()
        return d[:, 0] if scalar else d

    def value(self, r):
        scalar = np.ndim(r) == 0
        v = self.taylor(r, 0).c[0]
        return float(v[0]) if scalar else v.reshape(np.shape(r))

    __call__ = value

    def scaled(self, c):
        c = float(c)
        return RadialJetFunction(
            lambda r, d: self._taylor(r, d) * c,
            self.support,
            self.breakpoints,
            f"{c:g}*{self.name}",
            self.smoothness,
        )

    def __mul__(self, other):
        if isinstance(other, RadialJetFunction):
            return product(self, other)
        return self.scaled(other)

    __rmul__ = __mul__

    def __repr__(self):
        return f"RadialJetFunction({self.name!r}, support={self.support})"


def coth_jet(r, order):
    """Jet of coth at ``r > 0`` from the Riccati recurrence ``c' = 1 - c^2``.

    The first coefficient uses ``-1/sinh^2`` directly so that it keeps full
    relative precision at large radius.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    c = np.zeros((order + 1, r.size))
    c[0] = hypgeom.coth(r)
    if order >= 1:
        c[1] = -1.0 / np.sinh(r) ** 2
    for k in range(1, order):
        c[k + 1] = -np.einsum("ij,ij->j", c[: k + 1], c[k::-1]) / (k + 1)
    return Jet(c)


def grad_r(u):
    """The radial derivative ``u'``."""
    return RadialJetFunction(
        lambda r, d: u._taylor(r, d + 1).deriv(),
        u.support,
        u.breakpoints,
        f"grad({u.name})",
        u.smoothness - 1,
    )


def laplace_r(u, n):
    """The radial Laplacian ``u'' + (n - 1) coth(r) u'``."""
    n = hypgeom.check_dimension(n)

    def taylor(r, d):
        if np.any(r <= 0):
            raise ValueError("radial Laplacian is evaluated at r > 0 only")
        du = u._taylor(r, d + 2).deriv()
        return du.deriv() + coth_jet(r, d) * du.truncate(d) * (n - 1)

    return RadialJetFunction(
        taylor, u.support, u.breakpoints, f"lap({u.name})", u.smoothness - 2
    )


def nabla_r_k(u, k, n):
    """The iterated radial operator of order ``k``."""
    if int(k) != k or k < 0:
        raise ValueError("operator order must be a nonnegative integer")
    k = int(k)
    out = u
    for _ in range(k // 2):
        out = laplace_r(out, n)
    if k % 2:
        out = grad_r(out)
    return out


def product(u, v):
    a = max(u.support[0], v.support[0])
    b = min(u.support[1], v.support[1])
    if not a < b:
        # disjoint supports: the zero function on a nominal interval
        return RadialJetFunction(
            lambda r, d: Jet(np.zeros((d + 1, r.size))), u.support, (), "0"
        )
    return RadialJetFunction(
        lambda r, d: u._taylor(r, d) * v._taylor(r, d),
        (a, b),
        u.breakpoints + v.breakpoints,
        f"{u.name}*{v.name}",
        min(u.smoothness, v.smoothness),
    )


def square_identity_check(u, n, r):
    """Residual of the product rule ``lap(u^2) - 2 u lap(u) - 2 (u')^2`` at ``r``."""
    lap_sq = laplace_r(product(u, u), n).value(r)
    d = u.eval_jet(r, 1)
    lap_u = laplace_r(u, n).value(r)
    return lap_sq - 2.0 * d[0] * lap_u - 2.0 * d[1] ** 2


# -- test-function library ---------------------------------------------------

_EDGE_CUTOFF = 1.0 / 700.0


def _check_interval(a, b):
    if not (0 < a < b < math.inf):
        raise ValueError(f"need 0 < a < b < inf, got a={a}, b={b}")


def _bump_jet(x, a, b):
    """Jet of exp(4 - 1/(s(1-s))), s = (r-a)/(b-a); equals 1 at the midpoint."""
    s = (x - a) * (1.0 / (b - a))
    q = s * (1.0 - s)
    out = (4.0 - 1.0 / q).exp()
    # exp(4 - 700) is below every quantity of interest; flush to avoid overflow in 1/q^k
    out.c[:, q.c[0] < _EDGE_CUTOFF] = 0.0
    return out


def _variable(r, d):
    return Jet.variable(r, d)


def smooth_bump(a, b):
    """C-infinity bump supported on [a, b]."""
    _check_interval(a, b)
    return RadialJetFunction(
        lambda r, d: _bump_jet(_variable(r, d), a, b), (a, b), (), f"smooth_bump({a:g},{b:g})"
    )


def poly_bump(degree, a, b):
    """(4 s (1 - s))^degree on [a, b]; globally C^(degree-1)."""
    _check_interval(a, b)
    if int(degree) != degree or degree < 1:
        raise ValueError("degree must be a positive integer")
    degree = int(degree)

    def taylor(r, d):
        s = (_variable(r, d) - a) * (1.0 / (b - a))
        return (s * (1.0 - s) * 4.0) ** degree

    return RadialJetFunction(
        taylor, (a, b), (), f"poly_bump({degree},{a:g},{b:g})", degree - 1
    )


def gaussian_window(center, width, cutoff_a, cutoff_b):
    """Gaussian exp(-((r - center)/width)^2 / 2) times the smooth bump on [cutoff_a, cutoff_b]."""
    _check_interval(cutoff_a, cutoff_b)
    if not width > 0:
        raise ValueError("width must be positive")

    def taylor(r, d):
        x = _variable(r, d)
        z = (x - center) * (1.0 / width)
        return (z * z * -0.5).exp() * _bump_jet(x, cutoff_a, cutoff_b)

    return RadialJetFunction(
        taylor,
        (cutoff_a, cutoff_b),
        (),
        f"gaussian_window({center:g},{width:g},{cutoff_a:g},{cutoff_b:g})",
    )


def random_poly_bump(seed, a, b, degree=5):
    """Polynomial with seeded standard-normal coefficients (in s) times the smooth bump.

    The polynomial generally changes sign, so these functions oscillate.
    """
    _check_interval(a, b)
    coeffs = np.random.default_rng(seed).standard_normal(degree + 1)

    def taylor(r, d):
        x = _variable(r, d)
        s = (x - a) * (1.0 / (b - a))
        p = Jet.constant(coeffs[-1], d, r.size)
        for ck in coeffs[-2::-1]:
            p = p * s + ck
        return p * _bump_jet(x, a, b)

    return RadialJetFunction(taylor, (a, b), (), f"random_poly_bump({seed},{a:g},{b:g})")


def piecewise(r0, r1):
    """Continuous profile r0^(-1/2) on [0, r0), r^(-1/2) on [r0, r1),
    r1^(-1/2) (2 - r/r1) on [r1, 2 r1), 0 beyond; only C^0 at the joins."""
    if not (0 < r0 < r1 < math.inf):
        raise ValueError("need 0 < r0 < r1")

    def taylor(r, d):
        out = np.zeros((d + 1, r.size))
        lo = r < r0
        mid = (r >= r0) & (r < r1)
        hi = r >= r1
        out[0, lo] = r0**-0.5
        if np.any(mid):
            out[:, mid] = Jet.variable(r[mid], d).power(-0.5).c
        if np.any(hi):
            out[0, hi] = r1**-0.5 * (2.0 - r[hi] / r1)
            if d >= 1:
                out[1, hi] = -(r1**-1.5)
        return Jet(out)

    return RadialJetFunction(
        taylor, (0.0, 2.0 * r1), (r0, r1), f"piecewise({r0:g},{r1:g})", smoothness=0
    )


_FAMILIES = {
    "smooth_bump": smooth_bump,
    "poly_bump": poly_bump,
    "gaussian_window": gaussian_window,
    "random_poly_bump": random_poly_bump,
    "piecewise": piecewise,
}


def test_function_library(family, *args, **kwargs):
    """Construct a library function by family name."""
    try:
        ctor = _FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown family {family!r}; choose from {sorted(_FAMILIES)}"
        ) from None
    return ctor(*args, **kwargs)


test_function_library.__test__ = False  # not a pytest test despite the name

DEFAULT_SUPPORTS = ((0.1, 1.0), (1.0, 4.0), (5.0, 10.0))


def default_library(seed=20240611):
    """The twelve-function default library used by the inequality suites.

    Supports [0.1, 1], [1, 4], [5, 10]; per support one smooth bump, one
    polynomial bump, one Gaussian window and one seeded random polynomial
    times a bump.
    """
    s = DEFAULT_SUPPORTS
    return [
        smooth_bump(*s[0]),
        smooth_bump(*s[1]),
        smooth_bump(*s[2]),
        poly_bump(6, *s[0]),
        poly_bump(5, *s[1]),
        poly_bump(8, *s[2]),
        gaussian_window(0.4, 0.12, *s[0]),
        gaussian_window(2.0, 0.5, *s[1]),
        gaussian_window(8.5, 0.8, *s[2]),
        random_poly_bump(seed, *s[0]),
        random_poly_bump(seed + 1, *s[1]),
        random_poly_bump(seed + 2, *s[2]),
    ]
