"""Minimizing sequences for the sharp radial Poincare constants.

For thresholds ``R0 < R`` (hyperbolic volumes) the profile

    f_R(t) = R0^(-1/2) on [0, R0),  t^(-1/2) on [R0, R),
             R^(-1/2) (2 - t/R) on [R, 2R),  0 beyond

is lifted to H^N by ``u(x) = f_R(Vol B(o, |x|))``.  Iterating

    v_0 = f_R,   V_i(t) = int_0^t v_i,   v_{i+1}(t) = int_t^oo V_i(s) / G'(F(s))^2 ds

produces profiles whose lifts satisfy ``-lap_r lift(v_{i+1}) = lift(v_i)``.

Numerics.  The iteration is carried out in the geodesic radius: with
``a_i = v_i o G`` and ``A_i = V_i o G`` one has ``A_i' = a_i G'`` and
``a_{i+1}' = -A_i / G'``.  Each level is stored as degree-15 Legendre
polynomials on panels of width <= 0.05 (geometrically refined towards the pole,
aligned with the radii of R0, R and 2R) obtained by spectral integration.
Derivative jets of ``a_i`` at any radius follow from the two first-order
relations by jet arithmetic, so no numerical differentiation is involved.
Beyond ``r_cut = F(2R) + 36/(N - 1)`` the lifts are truncated; the neglected
mass is a factor ``e^-36`` below the retained one.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as L

from . import hypgeom
from .coefficients import sharp_constant
from .jets import Jet, compose, invert_series
from .quadrature import QuadratureConfig, integrate_halfline, integrate_hn_radial
from .radial import RadialJetFunction, laplace_r, nabla_r_k, piecewise

__all__ = [
    "SequenceParams",
    "QuotientRow",
    "QuotientSweep",
    "VIteration",
    "make_params",
    "profile_f_R",
    "profile_V0",
    "v_iteration",
    "lift_to_hn",
    "rayleigh_quotient",
    "construction_identity_residual",
    "certified_bound_k1",
    "sandwich_gap",
    "sharpness_sweep",
]

PANEL_WIDTH = 0.05
CUT_MARGIN = 36.0
_DEG = 15
_NODES, _WEIGHTS = L.leggauss(_DEG)
# Legendre coefficients from values at the Gauss nodes
_VINV = np.linalg.inv(L.legvander(_NODES, _DEG - 1))


@dataclass(frozen=True)
class SequenceParams:
    R0: float
    R: float
    eps: float
    iter: int = 0

    def __post_init__(self):
        if not (0 < self.R0 < self.R < math.inf):
            raise ValueError(f"need 0 < R0 < R, got R0={self.R0}, R={self.R}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if int(self.iter) != self.iter or self.iter < 0:
            raise ValueError("iter must be a nonnegative integer")

    @property
    def ln_ratio(self):
        return math.log(self.R / self.R0)


def make_params(n, eps, ln_ratio, iter=0, R0=None):
    """Parameters with ``R0 = threshold_R0(eps, n)`` (unless given) and ``R = R0 e^ln_ratio``."""
    if R0 is None:
        R0 = hypgeom.threshold_R0(eps, n)
    return SequenceParams(R0, R0 * math.exp(ln_ratio), eps, iter)


def profile_f_R(p):
    """The piecewise profile on the volume variable; C^0 with joins at R0, R, 2R."""
    f = piecewise(p.R0, p.R)
    f.name = f"f_R(R0={p.R0:.6g},R={p.R:.6g})"
    return f


def profile_V0(p):
    """Antiderivative ``V_0(t) = int_0^t f_R`` (closed form, C^1)."""
    R0, R = p.R0, p.R
    s0, s1 = math.sqrt(R0), math.sqrt(R)

    def taylor(t, d):
        out = np.zeros((d + 1, t.size))
        pieces = (
            t < R0,
            (t >= R0) & (t < R),
            (t >= R) & (t < 2 * R),
            t >= 2 * R,
        )
        if np.any(pieces[0]):
            out[:, pieces[0]] = (Jet.variable(t[pieces[0]], d) * (1.0 / s0)).c
        if np.any(pieces[1]):
            x = Jet.variable(t[pieces[1]], d)
            out[:, pieces[1]] = (x.power(0.5) * 2.0 - s0).c
        if np.any(pieces[2]):
            x = Jet.variable(t[pieces[2]], d) - R
            # int_R^t R^-1/2 (2 - s/R) ds = R^-1/2 (x - x^2/(2R)),  x = t - R
            out[:, pieces[2]] = ((x - x * x * (0.5 / R)) * (1.0 / s1) + (2 * s1 - s0)).c
        out[0, pieces[3]] = 2.5 * s1 - s0
        return Jet(out)

    return RadialJetFunction(taylor, (0.0, math.inf), (R0, R, 2 * R), "V_0", smoothness=1)


def _volume_jet(r, order, n):
    """Jets of G and G' at the radii ``r``."""
    sn = hypgeom.sphere_surface_measure(n)
    x = Jet.variable(r, order)
    sh, _ = x.sinh_cosh()
    dG = (sh ** (n - 1)) * sn
    G = dG.truncate(order - 1).integ(hypgeom.ball_volume_G(r, n)) if order else Jet.constant(
        hypgeom.ball_volume_G(r, n), 0
    )
    return G, dG


def lift_to_hn(profile, n):
    """``r -> profile(G(r))`` with jets by composition; breakpoints mapped through F."""
    n = hypgeom.check_dimension(n)
    a, b = profile.support
    ra = hypgeom.ball_volume_inverse_F(a, n)
    rb = math.inf if math.isinf(b) else hypgeom.ball_volume_inverse_F(b, n)
    bps = [hypgeom.ball_volume_inverse_F(t, n) for t in profile.breakpoints]

    def taylor(r, d):
        G, _ = _volume_jet(r, d, n)
        inner = G.copy()
        t0 = inner.c[0].copy()
        inner.c[0] = 0.0
        outer = profile.taylor(t0, d)
        return compose(outer.c, inner)

    return RadialJetFunction(
        taylor, (ra, rb), bps, f"lift({profile.name})", profile.smoothness
    )


def _panel_edges(n, p):
    rho = [hypgeom.ball_volume_inverse_F(t, n) for t in (p.R0, p.R, 2 * p.R)]
    r_cut = rho[2] + CUT_MARGIN / (n - 1)
    nuni = int(math.ceil(r_cut / PANEL_WIDTH))
    uniform = np.linspace(0.0, r_cut, nuni + 1)
    geometric = PANEL_WIDTH * 2.0 ** -np.arange(1, 40)
    edges = np.unique(np.concatenate([uniform, geometric, rho]))
    # merge slivers created by breakpoints landing next to grid nodes
    keep = np.concatenate([[True], np.diff(edges) > 1e-9 * np.maximum(edges[1:], 1e-300)])
    keep[-1] = True
    edges = edges[keep]
    for x in rho:
        edges[np.argmin(np.abs(edges - x))] = x
    return np.unique(edges), rho, r_cut


class VIteration:
    """The profiles ``v_0..v_depth`` represented on the geodesic radius.

    ``lifted(i)`` is ``lift(v_i)`` as a :class:`RadialJetFunction` on H^N;
    ``v(i)`` and ``g(i)`` are the volume-variable profiles.
    """

    def __init__(self, p, n, depth=None):
        self.params = p
        self.n = hypgeom.check_dimension(n)
        self.depth = p.iter if depth is None else int(depth)
        self.f = profile_f_R(p)
        self.V0 = profile_V0(p)
        self.edges, self.rho, self.r_cut = _panel_edges(self.n, p)
        self._sn = hypgeom.sphere_surface_measure(self.n)
        lo, hi = self.edges[:-1], self.edges[1:]
        self._mid, self._half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        self._x = self._mid[:, None] + self._half[:, None] * _NODES  # (P, 15)
        self._dG = self._sn * np.sinh(self._x) ** (self.n - 1)
        self._ca = [None]  # Legendre coefficients of a_i per panel, shape (16, P)
        self._cA = [None]
        self._A0 = self._lift_values(self.V0, self._x)
        for _ in range(self.depth):
            self._add_level()

    # -- construction ------------------------------------------------------
    def _lift_values(self, prof, r):
        t = hypgeom.ball_volume_G(r.ravel(), self.n)
        return prof.value(t).reshape(r.shape)

    def _A_nodes(self, i):
        if i == 0:
            return self._A0
        return self._eval_coeffs(self._cA[i], self._x)

    def _tail_integral_inv_dG(self, r):
        # int_r^oo dy / (|S| sinh^(n-1) y) for large r
        m = self.n - 1
        return 2.0**m * math.exp(-m * r) / (m * self._sn)

    def _add_level(self):
        i = len(self._ca)
        b = self._A_nodes(i - 1) / self._dG  # a_i' = -b
        cb = (_VINV @ b.T)  # (15, P)
        pan = (self._half * (_WEIGHTS @ b.T))
        a_cut = self._A_nodes(i - 1)[-1, -1] * self._tail_integral_inv_dG(self.r_cut)
        # value of a_i at the right edge of each panel: reverse cumulative sum
        right = np.concatenate([np.cumsum(pan[::-1])[::-1][1:], [0.0]]) + a_cut
        # a_i(xi) = a_i(right) + half * int_xi^1 b
        ca = -L.legint(cb, lbnd=1.0) * self._half
        ca[0] += right
        a_nodes = self._eval_coeffs(ca, self._x)
        y = a_nodes * self._dG
        cy = _VINV @ y.T
        panA = self._half * (_WEIGHTS @ y.T)
        left = np.concatenate([[0.0], np.cumsum(panA)[:-1]])
        cA = L.legint(cy, lbnd=-1.0) * self._half
        cA[0] += left
        self._ca.append(ca)
        self._cA.append(cA)

    def _locate(self, r):
        idx = np.searchsorted(self.edges, r, side="right") - 1
        return np.clip(idx, 0, self.edges.size - 2)

    def _eval_coeffs(self, c, r):
        r = np.asarray(r, dtype=float)
        if r.ndim == 2 and r.shape[0] == c.shape[1]:
            xi = (r - self._mid[:, None]) / self._half[:, None]
            return np.stack([L.legval(xi[p], c[:, p]) for p in range(r.shape[0])])
        flat = r.ravel()
        idx = self._locate(flat)
        xi = (flat - self._mid[idx]) / self._half[idx]
        return L.legval(xi, c[:, idx], tensor=False).reshape(r.shape)

    # -- values and jets ---------------------------------------------------
    def a_values(self, i, r):
        r = np.asarray(r, dtype=float)
        if i == 0:
            return self._lift_values(self.f, r)
        return self._eval_coeffs(self._ca[i], r)

    def A_values(self, i, r):
        r = np.asarray(r, dtype=float)
        if i == 0:
            return self._lift_values(self.V0, r)
        return self._eval_coeffs(self._cA[i], r)

    def _jets(self, i, r, d, cache):
        key = (i, d)
        if key in cache:
            return cache[key]
        if i == 0:
            ja = lift_to_hn(self.f, self.n).taylor(r, d)
            jA = lift_to_hn(self.V0, self.n).taylor(r, d)
        else:
            _, dG = _volume_jet(r, max(d - 1, 0), self.n)
            if d == 0:
                ja = Jet.constant(self.a_values(i, r), 0)
            else:
                jprev = self._jets(i - 1, r, d - 1, cache)[1]
                ja = (jprev / dG * -1.0).integ(self.a_values(i, r))
            if d == 0:
                jA = Jet.constant(self.A_values(i, r), 0)
            else:
                jcur = self._jets(i, r, d - 1, cache)[0]
                jA = (jcur * dG).integ(self.A_values(i, r))
        cache[key] = (ja, jA)
        return ja, jA

    def a_jet(self, i, r, order):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return self._jets(i, r, order, {})[0]

    def lifted(self, i):
        """``lift(v_i)`` on H^N (support ``[0, r_cut]``, globally C^(2i))."""
        self._check_level(i)
        if i == 0:
            return lift_to_hn(self.f, self.n)
        return RadialJetFunction(
            lambda r, d: self.a_jet(i, r, d),
            (0.0, self.r_cut),
            self.rho,
            f"lift(v_{i})",
            smoothness=2 * i,
        )

    def v(self, i):
        """``v_i`` on the volume variable (support ``[0, G(r_cut)]``)."""
        self._check_level(i)
        if i == 0:
            return self.f
        n = self.n

        def taylor(t, d):
            r = hypgeom.ball_volume_inverse_F(t, n)
            G, _ = _volume_jet(r, d, n)
            h = invert_series(G) if d else Jet(np.zeros((1, t.size)))
            return compose(self.a_jet(i, r, d).c, h)

        t_cut = hypgeom.ball_volume_G(self.r_cut, n)
        p = self.params
        return RadialJetFunction(taylor, (0.0, t_cut), (p.R0, p.R, 2 * p.R), f"v_{i}", 2 * i)

    def g(self, i):
        """``g_i(t) = (1/t) int_0^t v_{i-1}`` as a vectorized callable (i >= 1)."""
        self._check_level(i - 1)
        if i < 1:
            raise ValueError("g_i is defined for i >= 1")

        def g(t):
            t = np.asarray(t, dtype=float)
            r = hypgeom.ball_volume_inverse_F(t, self.n)
            with np.errstate(invalid="ignore", divide="ignore"):
                out = self.A_values(i - 1, r) / t
            return np.where(t > 0, out, self.a_values(i - 1, np.zeros_like(t)))

        return g

    def profiles(self):
        """The sequence (v_0, g_1, v_1, ..., g_depth, v_depth)."""
        out = [self.v(0)]
        for i in range(1, self.depth + 1):
            out += [self.g(i), self.v(i)]
        return out

    def _check_level(self, i):
        if not 0 <= i <= self.depth:
            raise ValueError(f"level {i} not built (depth {self.depth})")


def v_iteration(p, n, depth=None):
    return VIteration(p, n, depth)


def rayleigh_quotient(u, n, k, l, cfg=None):
    """(numerator, denominator, quotient) of ``int |nabla^k u|^2 / int |nabla^l u|^2`` over H^N."""
    cfg = cfg or QuadratureConfig()
    num_f = nabla_r_k(u, k, n)
    den_f = nabla_r_k(u, l, n)
    kw = dict(support=u.support, breakpoints=u.breakpoints)
    num = integrate_hn_radial(lambda r: num_f.value(r) ** 2, n, cfg=cfg, **kw)
    den = integrate_hn_radial(lambda r: den_f.value(r) ** 2, n, cfg=cfg, **kw)
    if den == 0.0:
        raise ValueError("zero denominator: the function vanishes identically")
    return num, den, num / den


def construction_identity_residual(vit, i, r):
    """Max over ``r`` of ``|lap_r lift(v_i) + lift(v_(i-1))| / |lift(v_(i-1))|``."""
    r = np.asarray(r, dtype=float)
    lap = laplace_r(vit.lifted(i), vit.n).value(r)
    prev = vit.a_values(i - 1, r)
    return float(np.max(np.abs(lap + prev) / np.abs(prev)))


def sandwich_gap(vit, cfg=None):
    """``(2/(n-1))^2 (1+eps)^-2 ||f_R||_2 - ||v_1||_2`` (norms on the volume variable).

    The lower sandwich bound asserts this stays below a constant independent of
    ``R``; a value <= 0 means the bound holds with constant zero.
    """
    cfg = cfg or QuadratureConfig()
    n, p = vit.n, vit.params
    f_norm = math.sqrt(math.log(p.R / p.R0) + 4.0 / 3.0)
    v1 = vit.lifted(1)
    v_norm = math.sqrt(
        integrate_hn_radial(lambda r: v1.value(r) ** 2, n, cfg=cfg, support=v1.support,
                            breakpoints=v1.breakpoints)
    )
    return (2.0 / (n - 1)) ** 2 / (1 + p.eps) ** 2 * f_norm - v_norm


def certified_bound_k1(n, eps, ln_ratio):
    """Upper bound ((n-1)^2/4)(1+eps)^2 (ln + 28/3)/(ln + 4/3) for the k = 1 quotient."""
    return (n - 1) ** 2 / 4 * (1 + eps) ** 2 * (ln_ratio + 28 / 3) / (ln_ratio + 4 / 3)


@dataclass(frozen=True)
class QuotientRow:
    ln_ratio: float
    R: float
    numerator: float
    denominator: float
    quotient: float
    certified_bound: float | None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class QuotientSweep:
    n: int
    k: int
    l: int
    eps: float
    R0: float
    sharp: float
    asymptotic_bound: float
    rows: tuple
    notes: tuple = ()

    @property
    def quotients(self):
        return [row.quotient for row in self.rows]

    def nonincreasing(self, rtol=1e-6):
        q = self.quotients
        return all(b <= a * (1 + rtol) for a, b in zip(q, q[1:]))

    @property
    def min_quotient(self):
        return min(self.quotients)


def _default_iter(k):
    return 0 if k == 1 else (k + 1) // 2


def sharpness_sweep(n, k, l, eps, ln_ratios, iter="auto", cfg=None, R0=None, identity_points=512):
    """Rayleigh quotients of the minimizing sequence over ``R = R0 e^ln`` for each ``ln``.

    ``k = 1`` uses ``lift(f_R)`` and reports the certified bound; even ``k``
    uses ``lift(v_(k/2))`` and reports the residual of ``(-lap)^(k/2) u = lift(f_R)``
    on ``identity_points`` radii; odd ``k >= 3`` uses ``lift(v_((k+1)/2))`` and
    reports the bootstrap check ``Q_k <= (2/(n-1))^2 Q_(k+1)``.
    """
    n = hypgeom.check_dimension(n)
    if l != 0:
        raise ValueError("the minimizing-sequence sweep is defined for l = 0 only")
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    k = int(k)
    depth = _default_iter(k) if iter == "auto" else int(iter)
    if 2 * depth < k and not (k == 1 and depth == 0):
        raise ValueError(f"iteration depth {depth} too small for k={k} (need 2*iter >= k)")
    if R0 is None:
        R0 = hypgeom.threshold_R0(eps, n)
    sharp = float(sharp_constant(n, k, 0))
    rows = []
    for ln in ln_ratios:
        p = SequenceParams(R0, R0 * math.exp(ln), eps, depth)
        extra = {}
        if depth == 0:
            u = lift_to_hn(profile_f_R(p), n)
        else:
            vit = VIteration(p, n)
            u = vit.lifted(depth)
            grid = np.linspace(0.0, vit.rho[2], identity_points + 2)[1:-1]
            extra["identity_residual"] = max(
                construction_identity_residual(vit, i, grid) for i in range(1, depth + 1)
            )
        num, den, q = rayleigh_quotient(u, n, k, 0, cfg)
        if k % 2 == 1 and k >= 3:
            num2, _, q2 = rayleigh_quotient(u, n, k + 1, 0, cfg)
            extra["quotient_k_plus_1"] = q2
            extra["bootstrap_ok"] = q <= (2.0 / (n - 1)) ** 2 * q2 * (1 + 1e-9)
        bound = certified_bound_k1(n, eps, ln) if k == 1 else None
        rows.append(QuotientRow(float(ln), p.R, num, den, q, bound, extra))
    notes = ()
    if k > 1:
        notes = ("certified bound available for k = 1 only; asymptotic bound is sharp*(1+eps)^(2k)",)
    return QuotientSweep(n, k, 0, eps, R0, sharp, sharp * (1 + eps) ** (2 * k), tuple(rows), notes)
