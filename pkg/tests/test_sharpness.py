import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from radpoincare import hypgeom as hg
from radpoincare.quadrature import integrate_halfline
from radpoincare.radial import default_library
from radpoincare.sharpness import (
    SequenceParams,
    VIteration,
    certified_bound_k1,
    construction_identity_residual,
    lift_to_hn,
    make_params,
    profile_f_R,
    profile_V0,
    rayleigh_quotient,
    sandwich_gap,
    sharpness_sweep,
)


@pytest.fixture(scope="module")
def vit4():
    return VIteration(make_params(4, 0.01, 5.0, iter=2), 4)


def test_params_validation():
    with pytest.raises(ValueError):
        SequenceParams(2.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        SequenceParams(1.0, 2.0, 0.0)
    with pytest.raises(ValueError):
        SequenceParams(1.0, 2.0, 0.1, iter=-1)
    p = make_params(4, 0.01, 3.0)
    assert p.R0 == hg.threshold_R0(0.01, 4) and p.ln_ratio == pytest.approx(3.0)


def test_profile_values_and_continuity():
    p = SequenceParams(4.0, 100.0, 0.1)
    f = profile_f_R(p)
    assert f.value(0.0) == 0.5
    assert f.value(100.0) == pytest.approx(0.1)
    assert f.value(100.0 - 1e-9) == pytest.approx(0.1, rel=1e-9)
    assert f.value(200.0) == 0.0
    assert f.breakpoints == (4.0, 100.0)
    V = profile_V0(p)
    for t in (4.0, 100.0, 200.0):
        assert V.value(t - 1e-9) == pytest.approx(V.value(t + 1e-9), abs=1e-8)
    assert V.value(1e9) == pytest.approx(2.5 * 10 - 2)


@pytest.mark.parametrize("ln", [1.0, 5.0, 20.0])
def test_exact_profile_integrals(ln):
    p = SequenceParams(3.0, 3.0 * math.exp(ln), 0.01)
    f = profile_f_R(p)
    l2 = integrate_halfline(lambda t: f.value(t) ** 2, support=f.support, breakpoints=f.breakpoints)
    assert l2 == pytest.approx(ln + 4 / 3, rel=1e-12)
    grad = integrate_halfline(lambda t: (f.eval_jet(t, 1)[1] * t) ** 2, support=f.support, breakpoints=f.breakpoints)
    assert grad == pytest.approx((ln + 28 / 3) / 4, rel=1e-12)


def test_lift_matches_direct_composition():
    p = SequenceParams(2.0, 50.0, 0.1)
    u = lift_to_hn(profile_f_R(p), 5)
    r = np.array([0.01, 0.5, 0.9, 1.3])
    direct = profile_f_R(p).value(hg.ball_volume_G(r, 5))
    assert np.allclose(u.value(r), direct, rtol=1e-14)
    assert u.value(0.0) == p.R0**-0.5
    # chain rule for the first derivative
    t = hg.ball_volume_G(r, 5)
    df = profile_f_R(p).eval_jet(t, 1)[1] * hg.ball_volume_derivative(r, 5)
    assert np.allclose(u.eval_jet(r, 1)[1], df, rtol=1e-12)
    assert u.breakpoints == pytest.approx((hg.ball_volume_inverse_F(2.0, 5), hg.ball_volume_inverse_F(50.0, 5)))


def v1_oracle(p, n, t):
    """v_1(t) = int_{F(t)}^oo V_0(G(y)) / G'(y) dy by scipy quadrature."""
    V = profile_V0(p)
    pts = [hg.ball_volume_inverse_F(x, n) for x in (p.R0, p.R, 2 * p.R)]
    r = hg.ball_volume_inverse_F(t, n)
    f = lambda y: V.value(hg.ball_volume_G(y, n)) / hg.ball_volume_derivative(y, n)  # noqa: E731
    end = pts[-1] + 40.0 / (n - 1)
    body, _ = integrate.quad(f, r, end, points=[x for x in pts if x > r], epsabs=0, epsrel=1e-12, limit=400)
    # beyond 2R the antiderivative is the constant 2.5 sqrt(R) - sqrt(R0)
    v_inf = 2.5 * math.sqrt(p.R) - math.sqrt(p.R0)
    sn = hg.sphere_surface_measure(n)
    tail, _ = integrate.quad(lambda y: (2 * math.exp(-y) / -math.expm1(-2 * y)) ** (n - 1) / sn, end, np.inf, epsabs=0, epsrel=1e-10)
    return body + v_inf * tail


@pytest.mark.parametrize("n", [3, 4, 7])
def test_v1_matches_independent_quadrature(n):
    p = make_params(n, 0.05, 4.0, iter=1)
    vit = VIteration(p, n)
    v1 = vit.v(1)
    for t in (0.3 * p.R0, p.R0, 3 * p.R0, 0.9 * p.R, 1.5 * p.R):
        assert v1.value(t) == pytest.approx(v1_oracle(p, n, t), rel=1e-9)


def test_v1_derivative_relation(vit4):
    # v_1'(t) = -V_0(t) / G'(F(t))^2
    p, n = vit4.params, vit4.n
    t = np.array([0.5 * p.R0, 2 * p.R0, 1.2 * p.R])
    dv = vit4.v(1).eval_jet(t, 1)[1]
    dG = hg.ball_volume_derivative(hg.ball_volume_inverse_F(t, n), n)
    assert np.allclose(dv, -profile_V0(p).value(t) / dG**2, rtol=1e-10)


def test_g1_is_mean_of_constant_below_R0(vit4):
    p = vit4.params
    t = np.array([1e-3, 0.5, 0.99]) * p.R0
    assert np.allclose(vit4.g(1)(t), p.R0**-0.5, rtol=1e-12)
    assert vit4.g(1)(np.array([0.0]))[0] == pytest.approx(p.R0**-0.5)


@pytest.mark.parametrize("i", [1, 2])
def test_profiles_nonincreasing_and_positive(vit4, i):
    p = vit4.params
    t = np.geomspace(1e-4 * p.R0, 2 * p.R, 600)
    v = vit4.v(i).value(t)
    assert np.all(v > 0)
    assert np.all(np.diff(v) <= 1e-14 * v[:-1])
    g = vit4.g(i)(t)
    assert np.all(np.diff(g) <= 1e-12 * g[:-1])
    seq = vit4.profiles()
    assert len(seq) == 2 * vit4.depth + 1


@pytest.mark.parametrize("n", [4, 6])
def test_construction_identities(n):
    vit = VIteration(make_params(n, 0.01, 6.0, iter=2), n)
    grid = np.linspace(0.0, vit.rho[2], 514)[1:-1]
    for i in (1, 2):
        assert construction_identity_residual(vit, i, grid) <= 1e-9


def test_sandwich_gap_bounded_in_R():
    gaps = []
    for ln in (1.0, 4.0, 8.0, 16.0):
        vit = VIteration(make_params(4, 0.01, ln, iter=1), 4)
        gaps.append(sandwich_gap(vit))
    # the lower sandwich bound holds with an R-independent constant
    assert max(gaps) < 0.5
    assert gaps[-1] <= gaps[0]


def test_level_bounds(vit4):
    with pytest.raises(ValueError):
        vit4.lifted(3)
    with pytest.raises(ValueError):
        vit4.g(0)


@given(idx=st.integers(0, 11), n=st.integers(3, 9), k=st.integers(1, 4), data=st.data())
def test_quotient_never_below_sharp_constant(library, idx, n, k, data):
    l = data.draw(st.integers(0, k - 1))
    u = library[idx]
    if u.smoothness < k - 1:
        return
    _, _, q = rayleigh_quotient(u, n, k, l)
    assert q >= (n - 1) ** (2 * (k - l)) / 4 ** (k - l) * (1 - 1e-8)


def test_quotient_scale_invariance(library):
    u = library[4]
    _, _, q = rayleigh_quotient(u, 5, 2, 0)
    _, _, q2 = rayleigh_quotient(u * 4.0, 5, 2, 0)
    assert q2 == q
    _, _, q3 = rayleigh_quotient(u * 0.37, 5, 2, 0)
    assert q3 == pytest.approx(q, rel=1e-13)


def test_zero_denominator_rejected():
    from radpoincare.harness import zero_function

    with pytest.raises(ValueError):
        rayleigh_quotient(zero_function(), 4, 1, 0)


def test_k1_sweep_below_certified_bound():
    sweep = sharpness_sweep(4, 1, 0, 0.01, [5.0, 10.0, 20.0])
    assert sweep.nonincreasing()
    for row in sweep.rows:
        assert 2.25 <= row.quotient <= row.certified_bound
        assert row.denominator == pytest.approx(row.ln_ratio + 4 / 3, rel=1e-9)
    assert certified_bound_k1(4, 0.01, 20.0) == pytest.approx(2.25 * 1.0201 * (88 / 3) / (64 / 3))


def test_k2_sweep_trend_and_exact_numerator():
    sweep = sharpness_sweep(5, 2, 0, 0.01, [3.0, 8.0, 16.0])
    assert sweep.nonincreasing()
    assert sweep.min_quotient >= 16.0
    for row in sweep.rows:
        # |lap u|^2 = lift(f_R)^2, so the numerator is ||f_R||^2
        assert row.numerator == pytest.approx(row.ln_ratio + 4 / 3, rel=1e-9)
        assert row.extra["identity_residual"] < 1e-9
    assert sweep.asymptotic_bound == pytest.approx(16 * 1.01**4)


def test_odd_k_bootstrap_reported():
    sweep = sharpness_sweep(4, 3, 0, 0.01, [4.0])
    row = sweep.rows[0]
    assert row.extra["bootstrap_ok"]
    assert row.quotient >= float(sweep.sharp)
    assert row.certified_bound is None and sweep.notes


def test_sweep_errors():
    with pytest.raises(ValueError):
        sharpness_sweep(4, 2, 1, 0.01, [2.0])
    with pytest.raises(ValueError):
        sharpness_sweep(4, 4, 0, 0.01, [2.0], iter=1)
    with pytest.raises(ValueError):
        sharpness_sweep(4, 0, 0, 0.01, [2.0])
