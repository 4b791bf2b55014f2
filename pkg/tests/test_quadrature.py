import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from radpoincare import hypgeom as hg
from radpoincare.quadrature import (
    QuadratureConfig,
    QuadratureError,
    WeightedIntegralSpec,
    adaptive_integrate,
    integrate_halfline,
    integrate_hn_radial,
    integrate_tail,
)
from radpoincare.radial import smooth_bump


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_ball_volume_by_quadrature(r):
    vol = integrate_hn_radial(lambda x: np.ones_like(x), 3, support=(0.0, r))
    assert vol == pytest.approx(math.pi * (math.sinh(2 * r) - 2 * r), rel=1e-10)


@pytest.mark.parametrize("n", [3, 6, 11])
@pytest.mark.parametrize("power", [0, 1.5, 4])
def test_weighted_integral_matches_scipy(n, power):
    u = smooth_bump(0.5, 3.0)
    w = WeightedIntegralSpec(power=power)
    got = integrate_hn_radial(lambda r: u.value(r) ** 2, n, w=w, support=u.support)
    ref, _ = integrate.quad(
        lambda r: u.value(r) ** 2 * r**-power * np.sinh(r) ** (n - 1), 0.5, 3.0, epsabs=0, epsrel=1e-13, limit=200
    )
    assert got == pytest.approx(hg.sphere_surface_measure(n) * ref, rel=1e-10)


def test_lebesgue_measure_and_function_object():
    u = smooth_bump(1.0, 2.0)
    got = integrate_hn_radial(u, 4, w=WeightedIntegralSpec(measure="lebesgue_1d"))
    ref, _ = integrate.quad(u.value, 1.0, 2.0, epsabs=0, epsrel=1e-13)
    assert got == pytest.approx(ref, rel=1e-10)


@given(c=st.floats(0.1, 0.9))
def test_kink_integrated_exactly_with_breakpoint(c):
    f = lambda x: np.abs(x - c)  # noqa: E731
    exact = (c**2 + (1 - c) ** 2) / 2
    assert adaptive_integrate(f, [0.0, c, 1.0]) == pytest.approx(exact, rel=1e-13)


def test_tail_integrals():
    assert integrate_tail(lambda t: 1 / t**2, 1.0).value == pytest.approx(1.0, rel=1e-10)
    assert integrate_tail(lambda t: 3 / t**2, 5.0).value == pytest.approx(0.6, rel=1e-10)
    assert integrate_halfline(lambda t: np.exp(-t), support=(0.0, math.inf)) == pytest.approx(1.0, rel=1e-10)
    trunc = QuadratureConfig(tail_estimate_mode="truncate")
    res = integrate_tail(lambda t: 1 / t**2, 1.0, trunc)
    assert res.tail == 0.0 and res.value == pytest.approx(1.0 - 1e-6, rel=1e-10)


def test_divergent_tail_detected():
    with pytest.raises(QuadratureError):
        integrate_tail(lambda t: 1 / t, 1.0)
    with pytest.raises(QuadratureError):
        integrate_tail(lambda t: np.sin(t) / t**0.5, 1.0)


def test_non_convergence_and_non_finite():
    cfg = QuadratureConfig(rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=3)
    with pytest.raises(QuadratureError):
        adaptive_integrate(lambda x: np.abs(x - 1 / 3) ** 0.5, [0.0, 1.0], cfg)
    with pytest.raises(QuadratureError):
        adaptive_integrate(lambda x: np.where(x > 0.5, np.inf, 0.0), [0.0, 1.0])


def test_pole_weight_requires_support_away_from_origin():
    with pytest.raises(ValueError):
        integrate_hn_radial(lambda r: r, 4, w=WeightedIntegralSpec(power=2), support=(0.0, 1.0))


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(tail_estimate_mode="magic")
    with pytest.raises(ValueError):
        WeightedIntegralSpec(measure="other")


def test_bit_reproducible():
    u = smooth_bump(1.0, 4.0)
    a = integrate_hn_radial(lambda r: u.value(r) ** 2 / (1 + r), 7, support=u.support)
    b = integrate_hn_radial(lambda r: u.value(r) ** 2 / (1 + r), 7, support=u.support)
    assert a == b


@given(a=st.floats(0, 5), width=st.floats(0.01, 10), k=st.integers(0, 6))
def test_polynomial_integrals_exact(a, width, k):
    b = a + width
    exact = (b ** (k + 1) - a ** (k + 1)) / (k + 1)
    assert adaptive_integrate(lambda x: x**k, [a, b]) == pytest.approx(exact, rel=1e-12)
