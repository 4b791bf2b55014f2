"""Acceptance criteria, each checked at its stated tolerance.

Every test prints exactly one line ``CRITERION <k> PASS|FAIL: <details>``.
"""

import math
import time

import numpy as np
import pytest

from radpoincare import coefficients as co
from radpoincare import hypgeom as hg
from radpoincare.harness import run_suite
from radpoincare.quadrature import integrate_halfline, integrate_hn_radial
from radpoincare.radial import (
    gaussian_window,
    laplace_r,
    product,
    random_poly_bump,
    smooth_bump,
    square_identity_check,
)
from radpoincare.sharpness import (
    VIteration,
    construction_identity_residual,
    lift_to_hn,
    make_params,
    profile_f_R,
    rayleigh_quotient,
    sharpness_sweep,
)


@pytest.fixture
def report(capsys):
    def emit(number, ok, details):
        with capsys.disabled():
            print(f"\nCRITERION {number} {'PASS' if ok else 'FAIL'}: {details}")
        return ok

    return emit


def test_criterion_1_exact_sequence_integrals(report):
    t0 = time.time()
    worst_hn, worst_1d = 0.0, 0.0
    for n in (3, 4, 5):
        for ln in (1.0, 5.0, 20.0):
            p = make_params(n, 0.01, ln)
            f = profile_f_R(p)
            u = lift_to_hn(f, n)
            l2 = integrate_hn_radial(lambda r: u.value(r) ** 2, n, support=u.support, breakpoints=u.breakpoints)
            worst_hn = max(worst_hn, abs(l2 / (ln + 4 / 3) - 1))
            g = integrate_halfline(lambda t: (f.eval_jet(t, 1)[1] * t) ** 2, support=f.support,
                                   breakpoints=f.breakpoints)
            worst_1d = max(worst_1d, abs(g / ((ln + 28 / 3) / 4) - 1))
    ok = worst_hn <= 1e-6 and worst_1d <= 1e-8
    report(1, ok, f"max rel err H^N {worst_hn:.2e} (tol 1e-6), 1-D {worst_1d:.2e} (tol 1e-8), {time.time() - t0:.1f}s")
    assert ok


def test_criterion_2_sharpness_trend(report):
    t0 = time.time()
    sweep = sharpness_sweep(4, 1, 0, 0.01, [5.0, 10.0, 20.0, 40.0])
    q = sweep.quotients
    monotone = sweep.nonincreasing(rtol=0.0)
    floor = min(q) >= 2.25 * (1 - 1e-8)
    gap = q[-1] / 2.25 - 1
    close = gap <= 0.08
    ok = monotone and floor and close
    report(2, ok, f"quotients {[round(x, 6) for x in q]}; nonincreasing={monotone}, above 2.25={floor}, "
                  f"gap at ln=40 {gap:.2%} (target <= 8%), {time.time() - t0:.1f}s")
    assert ok


def test_criterion_3_construction_identity(report):
    t0 = time.time()
    worst = 0.0
    for n in (4, 6):
        vit = VIteration(make_params(n, 0.01, 10.0, iter=1), n)
        grid = np.linspace(0.0, vit.rho[2], 514)[1:-1]
        worst = max(worst, construction_identity_residual(vit, 1, grid))
    ok = worst <= 1e-5
    report(3, ok, f"max relative residual {worst:.2e} on 512 points (tol 1e-5), {time.time() - t0:.1f}s")
    assert ok


def _documented_gap(family, k, l):
    return family == "D" and k % 2 == 1 and l % 2 == 1 and k - l != 2


def test_criterion_4_closed_forms(report):
    t0 = time.time()
    checked, gaps, mismatches = 0, [], []
    for n in range(3, 42):
        for beta in range(1, 5):
            for alpha in range(0, n):
                for fn, ok in ((co.xi_table, alpha < n - 4 * beta), (co.zeta_table, 2 * alpha <= n - 8 * beta + 1)):
                    if not ok:
                        continue
                    t = fn(n, alpha, beta)
                    checked += len(t.checks)
                    mismatches += [(t.family, n, alpha, beta, d) for d in t.discrepancies]
        for k in range(1, 9):
            for l in range(k):
                for family, fn, ok in (("C", co.c_table, n > 2 * k), ("D", co.d_table, n >= 4 * k - 1)):
                    if not ok:
                        continue
                    t = fn(n, k, l)
                    checked += len(t.checks)
                    for d in t.discrepancies:
                        (gaps if _documented_gap(family, k, l) else mismatches).append((family, n, k, l, d))
    ok = not mismatches
    detail = f"{checked} exact checks, {len(mismatches)} undocumented mismatches"
    if gaps:
        example = gaps[0]
        detail += (f", {len(gaps)} documented odd-k D^k entries (e.g. n={example[1]} k={example[2]} l={example[3]}: "
                   f"recursion {example[4].recursion} vs closed form {example[4].closed_form})")
    report(4, ok, f"{detail}, {time.time() - t0:.1f}s")
    assert ok


def test_criterion_5_inequality_suite(report):
    t0 = time.time()
    rep = run_suite("all", 9)
    bad = [r.spec.label for r in rep.reports if r.verdict != "pass"]
    ok = not bad and rep.min_rel_deficit >= -1e-9 and len(rep.reports) > 0
    report(5, ok, f"{len(rep.reports)} admissible specs x 12 functions, min rel deficit {rep.min_rel_deficit:.3e}, "
                  f"non-passing {bad}, {len(rep.inadmissible)} grid points outside hypotheses, {time.time() - t0:.1f}s")
    assert ok


def test_criterion_6_property_suites(report):
    t0 = time.time()
    rng = np.random.default_rng(12345)
    parts = {}
    # product identity for the radial Laplacian
    worst = 0.0
    for _ in range(100):
        seed, n = int(rng.integers(0, 10**6)), int(rng.integers(3, 13))
        a = float(rng.uniform(0.1, 5.0))
        b = a + float(rng.uniform(0.5, 5.0))
        u = random_poly_bump(seed, a, b)
        r = float(rng.uniform(a, b))
        d = u.eval_jet(r, 1)
        scale = max(abs(laplace_r(product(u, u), n).value(r)), abs(2 * d[0] * laplace_r(u, n).value(r)),
                    2 * d[1] ** 2, np.finfo(float).tiny)
        worst = max(worst, abs(square_identity_check(u, n, r)) / scale)
    parts["product identity"] = (worst <= 1e-10, f"{worst:.1e}")
    r = np.concatenate([np.geomspace(1e-8, 50, 2000), rng.uniform(0, 50, 2000)[1:]])
    r = r[r > 0]
    g = hg.g_weight(r)
    parts["g in (0,1/3]"] = (bool(np.all((g > 0) & (g <= 1 / 3))), f"[{g.min():.3g}, {g.max():.6g}]")
    t = np.geomspace(1e-6, 1e12, 3000)
    lowest = min(float(hg.sinh_growth_ratio(t, n).min()) for n in range(3, 9))
    parts["growth ratio >= 1"] = (lowest >= 1.0 - 1e-12, f"min {lowest:.15f}")
    dev = {n: hg.sinh_growth_ratio(1e4, n) - 1 for n in range(3, 9)}
    parts["growth ratio within 1e-3 at 1e4"] = (
        max(dev.values()) <= 1e-3, "dev " + ", ".join(f"n={n}:{v:.2e}" for n, v in dev.items()))
    rr = np.concatenate([np.geomspace(1e-3, 30, 400)])
    rt = max(float(np.max(np.abs(hg.ball_volume_inverse_F(hg.ball_volume_G(rr, n), n) - rr))) for n in range(3, 13))
    parts["F(G(r)) round trip"] = (rt <= 1e-9, f"{rt:.1e}")
    u = smooth_bump(1.0, 4.0)
    q = rayleigh_quotient(u, 6, 2, 1)[2]
    exact = all(rayleigh_quotient(u * c, 6, 2, 1)[2] == q for c in (2.0, 0.5, 1024.0))
    parts["scale invariance"] = (exact, "bit-exact for binary scalings")
    ok = all(v[0] for v in parts.values())
    summary = "; ".join(f"{k}: {'ok' if v[0] else 'NO'} ({v[1]})" for k, v in parts.items())
    report(6, ok, f"{summary}; {time.time() - t0:.1f}s")
    assert ok


def test_criterion_7_oracle_cross_checks(report):
    t0 = time.time()
    vol_err = max(
        abs(integrate_hn_radial(lambda x: np.ones_like(x), 3, support=(0.0, r)) / (math.pi * (math.sinh(2 * r) - 2 * r)) - 1)
        for r in (0.5, 1.0, 2.0)
    )
    orders = []
    for u, r0 in ((smooth_bump(1.0, 4.0), 1.7), (gaussian_window(2.0, 0.5, 1.0, 4.0), 2.4),
                  (random_poly_bump(3, 1.0, 4.0), 3.1)):
        exact = u.eval_jet(r0, 1)[1]
        errs = [abs((u.value(r0 + h) - u.value(r0 - h)) / (2 * h) - exact) for h in (1e-2, 1e-3, 1e-4)]
        orders += [math.log10(errs[i] / errs[i + 1]) for i in range(2)]
    fd_ok = all(1.8 <= o <= 2.2 for o in orders)
    ok = vol_err <= 1e-10 and fd_ok
    report(7, ok, f"ball volume rel err {vol_err:.1e} (tol 1e-10); central-difference orders "
                  f"{[round(o, 3) for o in orders]} (expect 2); {time.time() - t0:.1f}s")
    assert ok
