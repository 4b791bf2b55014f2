"""Radial integrals against the hyperbolic volume element and on the half-line.

The integrator is an adaptive composite Gauss-Legendre rule with 15-point
panels.  A panel's error is estimated by comparing the whole-panel rule with
the sum over its two halves; panels are bisected until the summed estimate
meets ``max(abs_tol, rel_tol * |I|)``.  Panels never straddle declared
breakpoints and the final sum is accumulated in sorted panel order with
``math.fsum`` so results are bit-reproducible for a fixed configuration.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import hypgeom

__all__ = [
    "QuadratureError",
    "QuadratureConfig",
    "WeightedIntegralSpec",
    "TailResult",
    "adaptive_integrate",
    "integrate_hn_radial",
    "integrate_halfline",
    "integrate_tail",
]

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


class QuadratureError(ArithmeticError):
    """Requested accuracy not reached, or a divergent integral was detected."""


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 20000
    tail_horizon: float = 1e6
    tail_estimate_mode: str = "power_law_extrapolate"
    initial_panels: int = 4

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.tail_horizon > 0:
            raise ValueError("tail_horizon must be positive")
        if self.tail_estimate_mode not in ("truncate", "power_law_extrapolate"):
            raise ValueError(f"unknown tail_estimate_mode {self.tail_estimate_mode!r}")
        if self.max_subdivisions < 1 or self.initial_panels < 1:
            raise ValueError("subdivision counts must be positive")


@dataclass(frozen=True)
class WeightedIntegralSpec:
    """Weight ``r^(-power)`` against the hyperbolic or the 1-D Lebesgue measure."""

    power: float = 0
    measure: str = "hyperbolic"

    def __post_init__(self):
        if self.measure not in ("hyperbolic", "lebesgue_1d"):
            raise ValueError(f"unknown measure {self.measure!r}")


@dataclass(frozen=True)
class TailResult:
    value: float
    body: float
    tail: float
    mode: str
    horizon: float

    def __float__(self):
        return self.value


def _panel_rules(f, lo, hi):
    """Whole-panel and two-halves Gauss-Legendre sums for arrays of panels."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    quarter = 0.5 * half
    x_whole = mid[:, None] + half[:, None] * _NODES
    x_left = (lo + quarter)[:, None] + quarter[:, None] * _NODES
    x_right = (mid + quarter)[:, None] + quarter[:, None] * _NODES
    x = np.concatenate([x_whole, x_left, x_right], axis=1)
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    p = _NODES.size
    whole = half * (vals[:, :p] @ _WEIGHTS)
    halves = quarter * (vals[:, p : 2 * p] @ _WEIGHTS + vals[:, 2 * p :] @ _WEIGHTS)
    return whole, halves


def adaptive_integrate(f, edges, cfg=None):
    """Integrate a vectorized ``f`` over ``[edges[0], edges[-1]]``.

    ``edges`` is an increasing sequence of finite points (endpoints plus
    breakpoints); no panel crosses an interior edge.
    """
    cfg = cfg or QuadratureConfig()
    edges = np.unique(np.asarray(edges, dtype=float))
    if edges.size < 2:
        return 0.0
    if not np.all(np.isfinite(edges)):
        raise ValueError("integration edges must be finite")
    t = np.linspace(0.0, 1.0, cfg.initial_panels + 1)
    lo = np.concatenate([a + (b - a) * t[:-1] for a, b in zip(edges[:-1], edges[1:])])
    hi = np.concatenate([a + (b - a) * t[1:] for a, b in zip(edges[:-1], edges[1:])])
    val, err = _evaluate(f, lo, hi)
    count = lo.size
    while True:
        total = math.fsum(val)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if math.fsum(err) <= tol:
            break
        # split the fewest largest-error panels that bring the remainder under tol/2
        order = np.argsort(-err, kind="stable")
        remaining = math.fsum(err) - np.cumsum(err[order])
        nsplit = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
        split = order[:nsplit]
        keep = np.ones(lo.size, dtype=bool)
        keep[split] = False
        slo, shi = lo[split], hi[split]
        mid = 0.5 * (slo + shi)
        if np.any((mid <= slo) | (mid >= shi)):
            raise QuadratureError("panel width underflow while refining")
        count += nsplit
        if count > cfg.max_subdivisions:
            raise QuadratureError(
                f"tolerance not met within {cfg.max_subdivisions} subdivisions "
                f"on [{edges[0]:g}, {edges[-1]:g}]"
            )
        nlo, nhi = np.concatenate([slo, mid]), np.concatenate([mid, shi])
        nval, nerr = _evaluate(f, nlo, nhi)
        lo, hi = np.concatenate([lo[keep], nlo]), np.concatenate([hi[keep], nhi])
        val, err = np.concatenate([val[keep], nval]), np.concatenate([err[keep], nerr])
    order = np.argsort(lo, kind="stable")
    return math.fsum(val[order])


def _evaluate(f, lo, hi):
    whole, halves = _panel_rules(f, lo, hi)
    if not (np.all(np.isfinite(whole)) and np.all(np.isfinite(halves))):
        raise QuadratureError("integrand is not finite at a quadrature node")
    return halves, np.abs(whole - halves)


def _field_parts(f, support, breakpoints):
    """Accept either a RadialJetFunction-like object or a bare callable."""
    if support is None:
        support = getattr(f, "support", (0.0, math.inf))
    if breakpoints is None:
        breakpoints = getattr(f, "breakpoints", ())
    fn = f.value if hasattr(f, "value") and hasattr(f, "support") else f
    return fn, (float(support[0]), float(support[1])), tuple(breakpoints)


def _edges(a, b, breakpoints):
    inner = [x for x in breakpoints if a < x < b]
    return [a, *sorted(inner), b]


def integrate_hn_radial(f, n, w=None, cfg=None, support=None, breakpoints=None):
    """``|S^{n-1}| int_0^oo f(r) r^(-p) sinh(r)^(n-1) dr`` (or the 1-D version
    when ``w.measure == 'lebesgue_1d'``), split at breakpoints.

    ``f`` is a vectorized callable or a RadialJetFunction (its value is used,
    with support and breakpoints taken from it unless given).
    """
    n = hypgeom.check_dimension(n)
    w = w or WeightedIntegralSpec()
    cfg = cfg or QuadratureConfig()
    fn, (a, b), bps = _field_parts(f, support, breakpoints)
    p = w.power
    if p > 0 and a <= 0.0:
        raise ValueError(
            f"weight r^-{p} requires support bounded away from the pole; support starts at {a}"
        )
    if w.measure == "hyperbolic":
        sn = hypgeom.sphere_surface_measure(n)

        def integrand(r):
            return fn(r) * r ** (-p) * (sn * np.sinh(r) ** (n - 1))

    else:

        def integrand(r):
            return fn(r) * r ** (-p)

    if math.isinf(b):
        return integrate_tail(integrand, a, cfg).value
    return adaptive_integrate(integrand, _edges(a, b, bps), cfg)


def integrate_halfline(f, cfg=None, support=None, breakpoints=None):
    """``int_0^oo f(t) dt`` with splitting at breakpoints; an unbounded
    support is handled by :func:`integrate_tail`."""
    cfg = cfg or QuadratureConfig()
    fn, (a, b), bps = _field_parts(f, support, breakpoints)
    if math.isinf(b):
        finite = [x for x in bps if x > a]
        if finite:
            head = adaptive_integrate(fn, _edges(a, max(finite), bps), cfg)
            return head + integrate_tail(fn, max(finite), cfg).value
        return integrate_tail(fn, a, cfg).value
    return adaptive_integrate(fn, _edges(a, b, bps), cfg)


def integrate_tail(f, start, cfg=None):
    """``int_start^oo f`` as a body on ``[start, horizon]`` plus a tail estimate.

    With ``power_law_extrapolate`` the integrand is modelled as ``c / t^2`` on
    the last decade ``[horizon/10, horizon]`` (``c`` fitted from the integral
    over that decade) and ``c / horizon`` is added.  The integrand must decay
    faster than ``1/t`` there; otherwise ``QuadratureError`` is raised.
    """
    cfg = cfg or QuadratureConfig()
    start = float(start)
    horizon = cfg.tail_horizon
    if not horizon > 10.0 * max(start, 0.0):
        raise ValueError(f"tail horizon {horizon:g} must exceed 10 * start = {10 * start:g}")
    lo = max(start, horizon * 1e-12)
    # geometric edges keep panels proportional to the scale of t
    ndec = max(1, int(math.ceil(math.log10(horizon / lo))))
    edges = np.geomspace(lo, horizon, ndec + 1)
    edges[-1] = horizon
    if start < lo:
        edges = np.concatenate([[start], edges])
    fv = np.asarray(f(np.array([horizon / 10.0, horizon])), dtype=float)
    if fv[1] != 0.0:
        if fv[0] == 0.0 or fv[0] * fv[1] < 0 or abs(fv[1] / fv[0]) > 10.0**-1.5:
            raise QuadratureError(
                f"tail decay not detected at horizon {horizon:g}: "
                f"f({horizon / 10:g})={fv[0]:.3g}, f({horizon:g})={fv[1]:.3g}"
            )
    body = adaptive_integrate(f, edges, cfg)
    tail = 0.0
    if cfg.tail_estimate_mode == "power_law_extrapolate":
        last = adaptive_integrate(f, [horizon / 10.0, horizon], cfg)
        c = last / (10.0 / horizon - 1.0 / horizon)
        tail = c / horizon
    return TailResult(body + tail, body, tail, cfg.tail_estimate_mode, horizon)
