"""Geometry of the hyperbolic space H^N in geodesic polar coordinates.

The volume element of H^N in polar coordinates is ``sinh(r)^(N-1) dr dsigma``,
so for a radial function ``f`` we have

    int_{H^N} f dv = |S^{N-1}| int_0^oo f(r) sinh(r)^(N-1) dr.

``ball_volume_G`` is the volume of the geodesic ball of radius ``r`` and
``ball_volume_inverse_F`` its inverse, mapping a volume back to a radius.
The constant in front of the radial integral is the surface measure
``|S^{N-1}| = 2 pi^(N/2) / Gamma(N/2)``, so ``G`` is the true ball volume.
"""

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "RootFindingError",
    "check_dimension",
    "sphere_surface_measure",
    "ball_volume_G",
    "ball_volume_derivative",
    "ball_volume_inverse_F",
    "g_weight",
    "coth_minus_inv",
    "coth",
    "sinh_growth_ratio",
    "threshold_R0",
]

SERIES_SWITCH = 1.0
_G_SERIES_SWITCH = 1.0


class RootFindingError(ArithmeticError):
    """The inverse volume map did not converge."""


def check_dimension(n):
    if int(n) != n or n < 3:
        raise ValueError(f"dimension must be an integer >= 3, got {n!r}")
    return int(n)


def sphere_surface_measure(n):
    """Surface measure |S^{n-1}| of the unit sphere in R^n."""
    n = check_dimension(n)
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@lru_cache(maxsize=None)
def _sinhc_power_series(m):
    # coefficients c_k of (sinh s / s)^m = sum_k c_k s^(2k); all positive
    nterms = 60 + 2 * m
    base = np.array([1.0 / math.factorial(2 * k + 1) for k in range(nterms)])
    out = np.zeros(nterms)
    out[0] = 1.0
    for _ in range(m):
        out = np.convolve(out, base)[:nterms]
    return out


def _sinh_power_integral(r, m):
    """int_0^r sinh(s)^m ds for an array r >= 0."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    small = r < _G_SERIES_SWITCH
    if np.any(small):
        rs = r[small]
        c = _sinhc_power_series(m)
        k = np.arange(c.size)
        expo = m + 2 * k + 1
        # Horner in rs^2 on c_k / (m + 2k + 1)
        acc = np.zeros_like(rs)
        r2 = rs * rs
        for ck, ek in zip(c[::-1], expo[::-1]):
            acc = acc * r2 + ck / ek
        out[small] = acc * rs ** (m + 1)
    big = ~small
    if np.any(big):
        rb = r[big]
        sh, ch = np.sinh(rb), np.cosh(rb)
        # I_j = sinh^(j-1) cosh / j - (j-1)/j I_{j-2}
        if m % 2 == 0:
            acc, j = rb.copy(), 0
        else:
            acc, j = 2.0 * np.sinh(rb / 2) ** 2, 1
        while j < m:
            j += 2
            acc = sh ** (j - 1) * ch / j - (j - 1) / j * acc
        out[big] = acc
    return out


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def ball_volume_G(r, n):
    """Hyperbolic volume of the geodesic ball of radius ``r`` in H^n."""
    n = check_dimension(n)
    arr, scalar = _as_array(r)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("radius must be finite and nonnegative")
    out = sphere_surface_measure(n) * _sinh_power_integral(np.atleast_1d(arr), n - 1)
    return float(out[0]) if scalar else out.reshape(arr.shape)


def ball_volume_derivative(r, n):
    """dG/dr = |S^{n-1}| sinh(r)^(n-1)."""
    n = check_dimension(n)
    arr, scalar = _as_array(r)
    out = sphere_surface_measure(n) * np.sinh(arr) ** (n - 1)
    return float(out) if scalar else out


def ball_volume_inverse_F(t, n, rtol=1e-14, maxiter=100):
    """Radius of the geodesic ball of volume ``t`` (inverse of ``ball_volume_G``).

    Safeguarded Newton iteration on ``log G(r) = log t`` inside a bracket built
    from ``sinh s >= s`` (upper bound) and ``sinh s <= e^s / 2`` (lower bound).
    """
    n = check_dimension(n)
    arr, scalar = _as_array(t)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("volume must be nonnegative")
    tt = np.atleast_1d(arr).astype(float).ravel()
    out = np.zeros_like(tt)
    pos = tt > 0
    if np.any(pos):
        out[pos] = _invert_volume(tt[pos], n, rtol, maxiter)
    out = out.reshape(np.atleast_1d(arr).shape)
    return float(out[0]) if scalar else out.reshape(arr.shape)


def _invert_volume(t, n, rtol, maxiter):
    sn = sphere_surface_measure(n)
    m = n - 1
    # G(r) >= |S| r^n / n  and, for r >= 1, G(r) >= |S| sinh(r - 1)^m
    hi = np.minimum((t * n / sn) ** (1.0 / n), 1.0 + np.arcsinh((t / sn) ** (1.0 / m)))
    lo = np.log(np.maximum(t * m * 2.0**m / sn, 1.0)) / m
    lo = np.minimum(lo, hi)
    logt = np.log(t)
    r = 0.5 * (lo + hi)
    done = np.zeros(t.shape, dtype=bool)
    for _ in range(maxiter):
        act = ~done
        ra = r[act]
        g = ball_volume_G(ra, n)
        phi = np.log(g) - logt[act]
        # tighten the bracket
        lo_a, hi_a = lo[act], hi[act]
        lo_a = np.where(phi < 0, ra, lo_a)
        hi_a = np.where(phi > 0, ra, hi_a)
        dphi = sn * np.sinh(ra) ** m / g
        step = phi / dphi
        cand = ra - step
        bad = ~((cand > lo_a) & (cand < hi_a)) | ~np.isfinite(cand)
        cand = np.where(bad, 0.5 * (lo_a + hi_a), cand)
        conv = (np.abs(cand - ra) <= rtol * np.abs(cand)) | (phi == 0)
        lo[act], hi[act], r[act] = lo_a, hi_a, cand
        idx = np.flatnonzero(act)
        done[idx[conv]] = True
        if done.all():
            return r
    raise RootFindingError(
        f"inverse volume map did not converge for {int((~done).sum())} value(s)"
    )


def _positive_radius(r):
    arr, scalar = _as_array(r)
    if np.any(~(arr > 0)):
        raise ValueError("radius must be > 0")
    return arr, scalar


@lru_cache(maxsize=None)
def _xcoth_coefficients(nterms=32):
    # x coth x = sum_k b_k x^(2k) with b_0 = 1 and (2k + 1) b_k = [k == 1] - sum_{i=1}^{k-1} b_i b_(k-i)
    b = [Fraction(1)]
    for k in range(1, nterms):
        acc = Fraction(int(k == 1)) - sum(b[i] * b[k - i] for i in range(1, k))
        b.append(acc / (2 * k + 1))
    return np.array([float(v) for v in b[1:]])


def _g_series(x):
    # (x coth x - 1) / x^2 = sum_{k>=1} b_k x^(2k-2); terms shrink like (x/pi)^(2k)
    x2 = x * x
    out = np.zeros_like(x)
    for c in _xcoth_coefficients()[::-1]:
        out = out * x2 + c
    return out


def coth_minus_inv(r):
    """coth(r) - 1/r, with a series branch below ``SERIES_SWITCH``."""
    arr, scalar = _positive_radius(r)
    x = np.atleast_1d(arr)
    out = np.empty_like(x)
    small = x < SERIES_SWITCH
    out[small] = x[small] * _g_series(x[small])
    xb = x[~small]
    out[~small] = 1.0 / np.tanh(xb) - 1.0 / xb
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def coth(r):
    arr, scalar = _positive_radius(r)
    out = 1.0 / arr + coth_minus_inv(arr)
    return float(out) if scalar else out


def g_weight(r):
    """The weight g(r) = (r coth r - 1) / r^2, which lies in (0, 1/3]."""
    arr, scalar = _positive_radius(r)
    x = np.atleast_1d(arr)
    out = np.empty_like(x)
    small = x < SERIES_SWITCH
    out[small] = _g_series(x[small])
    xb = x[~small]
    out[~small] = (xb / np.tanh(xb) - 1.0) / xb**2
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def sinh_growth_ratio(t, n):
    """|S^{n-1}| sinh(F(t))^(n-1) / ((n-1) t) for a volume t > 0.

    Always >= 1 and tends to 1 as t -> oo.
    """
    n = check_dimension(n)
    arr, scalar = _as_array(t)
    if np.any(~(arr > 0)):
        raise ValueError("volume must be > 0")
    r = ball_volume_inverse_F(arr, n)
    out = ball_volume_derivative(r, n) / ((n - 1) * arr)
    return float(out) if scalar else out


def threshold_R0(eps, n, t_min=1e-6, q=1.05, horizon=1e6):
    """Smallest volume on a geometric grid beyond which the growth ratio stays <= 1 + eps.

    The grid is ``t_min * q**j`` up to ``horizon``. Raises if the ratio still
    exceeds ``1 + eps`` at the horizon.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    n = check_dimension(n)
    nsteps = int(math.floor(math.log(horizon / t_min) / math.log(q)))
    grid = t_min * q ** np.arange(nsteps + 1)
    ratio = sinh_growth_ratio(grid, n)
    fails = np.flatnonzero(ratio > 1.0 + eps)
    if fails.size == 0:
        return float(grid[0])
    last = fails[-1]
    if last == grid.size - 1:
        raise ValueError(
            f"growth ratio exceeds 1+{eps} at the scan horizon {horizon:g}; "
            "increase the horizon"
        )
    return float(grid[last + 1])
