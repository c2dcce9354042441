import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbmstab.moment import (
    MomentConstants,
    StepTooLarge,
    conserved,
    d_second,
    d_second_fd,
    dprime_table,
    moment_constants,
    omega_quadrature,
    omega_threshold,
    scalar_conserved,
    sech_integrals,
    sech_power_integral,
)
from bbmstab.nonlinearity import example1
from bbmstab.profile import WaveProfile


# --------------------------------------------------------------------------
# sech integrals


def test_p2_integrals():
    I1, I2 = sech_integrals(2)
    assert I1 == pytest.approx(2.0, rel=1e-12)
    assert I2 == pytest.approx(2.0 / 3.0, rel=1e-12)


@pytest.mark.parametrize("p", range(1, 9))
def test_integrals_match_closed_forms(p):
    m = 4.0 / p
    I1, I2 = sech_integrals(p)
    assert I1 == pytest.approx(sech_power_integral(m), rel=1e-11)
    # integrating tanh^2 sech^m = sech^m - sech^{m+2} and B(a+1, 1/2) = B(a, 1/2) a / (a + 1/2)
    assert I2 == pytest.approx(sech_power_integral(m) / (m + 1.0), rel=1e-11)


@pytest.mark.parametrize("p", [1, 3, 7])
def test_integrals_match_mpmath(p):
    m = mp.mpf(4) / p
    I1 = 2 * mp.quad(lambda y: mp.sech(y) ** m, [0, mp.inf])
    I2 = 2 * mp.quad(lambda y: mp.tanh(y) ** 2 * mp.sech(y) ** m, [0, mp.inf])
    a, b = sech_integrals(p)
    assert a == pytest.approx(float(I1), rel=1e-12)
    assert b == pytest.approx(float(I2), rel=1e-12)


# --------------------------------------------------------------------------
# theta constants and q


@pytest.mark.parametrize("p", range(1, 7))
def test_q_at_one(p):
    mc = moment_constants(p, 0.3, 1.7)
    assert mc.q(1.0) == pytest.approx(2 * mc.theta1 * (1.0 / p - 0.25), rel=1e-10)


@settings(max_examples=30)
@given(st.integers(1, 8), st.floats(-2, 2), st.floats(0.2, 5.0), st.floats(1.05, 4.0))
def test_theta_form_matches_direct_quadrature(p, mu, hu, omega):
    mc = moment_constants(p, mu, hu)
    assert mc.omega_integral(omega) == pytest.approx(omega_quadrature(omega, p, mu, hu), rel=1e-9)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_d_second_positive_for_low_p(p):
    mc = moment_constants(p, 0.0, 1.0)
    ws = np.geomspace(1.0001, 50.0, 40)
    assert all(d_second(w, mc) > 0 for w in ws)
    assert omega_threshold(mc) is None


@pytest.mark.parametrize("p", [5, 6, 7, 8])
def test_sign_change_at_threshold(p):
    mc = moment_constants(p, 0.0, 1.0)
    wp = omega_threshold(mc)
    assert wp > 1.0
    assert abs(d_second(wp, mc)) <= 1e-8
    assert d_second(wp * (1 - 1e-3), mc) < 0 < d_second(wp * (1 + 1e-3), mc)
    a, b, c = mc.q_coeffs()
    assert a > 0 > c


@pytest.mark.parametrize("p", [5, 6])
def test_threshold_against_mpmath_oracle(p):
    # root of d/dw Omega(Phi_w), from a 30-digit quadrature that never forms q
    with mp.workdps(30):
        root = _mp_threshold(p)
    assert omega_threshold(moment_constants(p, 0.0, 1.0)) == pytest.approx(float(root), rel=1e-10)


def _mp_threshold(p):
    pp = mp.mpf(p)

    def Omega(w):
        A = (pp + 2) * (w - 1) / 2
        B = pp / 2 * mp.sqrt((w - 1) / w)
        f = lambda x: A ** (2 / pp) * mp.sech(B * x) ** (4 / pp) * (1 + (2 * B / pp) ** 2 * mp.tanh(B * x) ** 2)
        return mp.quad(f, [0, mp.inf])

    return mp.findroot(lambda w: mp.diff(Omega, w), (mp.mpf("1.05"), mp.mpf("1.5")), solver="illinois")


@settings(max_examples=25)
@given(st.integers(5, 10), st.floats(-3, 3), st.floats(0.1, 10.0))
def test_threshold_independent_of_mu_and_hu(p, mu, hu):
    a = omega_threshold(moment_constants(p, mu, hu))
    b = omega_threshold(moment_constants(p, 0.0, 1.0))
    assert a == pytest.approx(b, rel=1e-13)


def test_threshold_stable_branch_matches_plain_formula():
    mc = MomentConstants(theta1=1.0, theta2=0.5, p=6, mu=0.0, hu=1.0)
    a, b, c = mc.q_coeffs()
    plain = (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)
    assert omega_threshold(mc) == pytest.approx(plain, rel=1e-13)


@pytest.mark.parametrize("p", [1, 2, 3, 5, 6])
def test_closed_form_matches_finite_difference_oracle(p):
    mc = moment_constants(p, 0.5, 1.3)
    wp = omega_threshold(mc)
    ws = np.linspace(1.05, 3.0, 10)
    for w in ws:
        if wp is not None and abs(w - wp) < 0.02 * wp:
            continue
        assert d_second(w, mc) == pytest.approx(d_second_fd(w, p, 0.5, 1.3), rel=1e-4)


def test_fd_oracle_reports_bad_step():
    with pytest.raises(StepTooLarge):
        d_second_fd(1.02, 6, 0.0, 1.0, h=0.015)


def test_domain_checks():
    mc = moment_constants(2, 0.0, 1.0)
    with pytest.raises(ValueError):
        d_second(1.0, mc)
    with pytest.raises(ValueError):
        moment_constants(2, 0.0, -1.0)


def test_dprime_table_rows():
    mc = moment_constants(5, 0.0, 1.0)
    rows = dprime_table(mc, np.linspace(1.01, 2.0, 12))
    signs = np.sign([r[1] for r in rows])
    assert np.count_nonzero(np.diff(signs)) == 1
    assert all(np.sign(r[1]) == np.sign(r[2]) for r in rows)


# --------------------------------------------------------------------------
# grid functionals


def test_conserved_on_the_wave():
    # Example 1 at omega = 2, mu = 1: H_u(1,1) = 2
    H = example1(1, 1.0, 1.0)
    w = WaveProfile(1, 2.0, 2.0, 1.0)
    L = 200.0
    n = 4096
    x = -L / 2 + L / n * np.arange(n)
    c = conserved(w.field(x), L / n, H)
    assert c.Omega == pytest.approx(omega_quadrature(2.0, 1, 1.0, 2.0), rel=1e-10)
    # Theta = -1/2 int U.U + 2 H(U); check against a direct trapezoid sum
    U = w.field(x)
    from bbmstab.nonlinearity import eval_H
    direct = -0.5 * np.sum(U[0] ** 2 + U[1] ** 2 + 2 * eval_H(H, U[0], U[1])) * L / n
    assert c.Theta == pytest.approx(direct, rel=1e-12)


def test_nonperiodic_branch_close_to_periodic():
    w = WaveProfile(2, 1.5, 1.0, 0.5)
    x = np.linspace(-60, 60, 6001)
    a = conserved(w.field(x), x[1] - x[0], periodic=False)
    b = conserved(w.field(x[:-1]), x[1] - x[0], periodic=True)
    assert a.Omega == pytest.approx(b.Omega, rel=1e-4)


def test_scalar_reduction():
    # u_t + u_x - u_xxt + hbar u^p u_x = 0: Theta = -1/2 int u^2 + 2 hbar u^{p+2} / ((p+1)(p+2))
    x = np.linspace(-30, 30, 2048, endpoint=False)
    u = 0.8 / np.cosh(0.5 * x) ** 2
    dx = x[1] - x[0]
    c = scalar_conserved(u, dx, hbar=1.5, p=2)
    expect = -0.5 * np.sum(u ** 2 + 2 * 1.5 * u ** 4 / 12) * dx
    assert c.Theta == pytest.approx(expect, rel=1e-12)
