import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from bbmstab.criterion import build_M
from bbmstab.nonlinearity import example1, example2, example3, example4, find_ratios, make_ratio
from bbmstab.profile import WaveProfile
from bbmstab.spectral import (
    DiscretizationParams,
    GridTooCoarse,
    Unsupported,
    analytic_L1_eigenvalues,
    analytic_L1_least,
    analytic_L2_eigenvalues,
    block_eigenvalues,
    interior_grid,
    l2_positivity_threshold,
    l2_s,
    legendre_eigenfunction,
    numeric_spectrum,
    operator_matrix,
    poschl_teller_numeric,
    poschl_teller_spectrum,
    schrodinger_eigenvalues,
    linearized_report,
    zero_mode_residual,
)

ALPHAS = [2.0, 6.0, 12.0, 20.0, 3.75, 0.5]


# --------------------------------------------------------------------------
# exactly solvable sech^2 well


def test_alpha_12_ladder():
    assert poschl_teller_spectrum(12.0).eigenvalues == pytest.approx((-9.0, -4.0, -1.0), abs=1e-12)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_numeric_matches_ladder(alpha):
    exact = poschl_teller_spectrum(alpha).eigenvalues
    num = poschl_teller_numeric(alpha, k=len(exact) + 1)
    assert num[: len(exact)] == pytest.approx(exact, abs=1e-4)
    # the next eigenvalue belongs to the (discretized) continuum
    assert num[len(exact)] > -1e-3


@given(st.floats(0.05, 40.0))
def test_ladder_structure(alpha):
    pt = poschl_teller_spectrum(alpha)
    s = pt.s
    assert s * (s + 1) == pytest.approx(alpha)
    assert len(pt.eigenvalues) == int(np.ceil(s - 1e-12))
    assert pt.least == pytest.approx(-s * s)
    gaps = np.diff(np.sqrt(-np.array(pt.eigenvalues)))
    assert np.allclose(gaps, -1.0)


@pytest.mark.parametrize("s,eps", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_legendre_table_matches_scipy(s, eps):
    xi = np.linspace(-0.95, 0.95, 21)
    x = np.arctanh(xi)
    assert np.allclose(legendre_eigenfunction(s, eps, x), special.lpmv(eps, s, xi), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("s,eps", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (2.5, 2.5), (0.7, 0.7)])
def test_legendre_functions_are_eigenfunctions(s, eps):
    # (-d^2 - s(s+1) sech^2) P = -eps^2 P, checked with a fine central difference
    x = np.linspace(-4, 4, 81)
    h = 1e-4
    f = lambda y: legendre_eigenfunction(s, eps, y)
    lap = (f(x + h) - 2 * f(x) + f(x - h)) / h ** 2
    res = -lap - s * (s + 1) / np.cosh(x) ** 2 * f(x) + eps ** 2 * f(x)
    assert np.max(np.abs(res)) <= 1e-5 * (1 + np.max(np.abs(f(x))))


def test_legendre_outside_table():
    with pytest.raises(Unsupported):
        legendre_eigenfunction(4, 2, np.zeros(3))


# --------------------------------------------------------------------------
# discretization


@pytest.mark.parametrize("scheme", ["fd2", "fd4", "spectral"])
def test_harmonic_oscillator(scheme):
    # -d^2 + x^2 has eigenvalues 1, 3, 5, ...
    n = 1024 if scheme != "spectral" else 256
    ev = schrodinger_eigenvalues(lambda x: x * x, 1.0, 10.0, n, 4, scheme, richardson=False)
    tol = {"fd2": 1e-3, "fd4": 1e-6, "spectral": 1e-9}[scheme]
    assert ev == pytest.approx([1.0, 3.0, 5.0, 7.0], abs=tol)


@pytest.mark.parametrize("scheme", ["fd2", "fd4", "spectral"])
def test_operator_matrix_symmetric(scheme):
    x, h = interior_grid(5.0, 64)
    A = operator_matrix(np.cos(x), 1.3, h, scheme)
    assert np.allclose(A, A.T)


def test_orders_of_accuracy():
    errs = {}
    for scheme in ("fd2", "fd4"):
        e = [abs(poschl_teller_numeric(2.0, 20.0, n, k=1, scheme=scheme)[0] + 1.0) for n in (255, 511)]
        errs[scheme] = np.log2(e[0] / e[1])
    assert errs["fd2"] == pytest.approx(2.0, abs=0.2)
    assert errs["fd4"] == pytest.approx(4.0, abs=0.4)


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        numeric_spectrum(1.0, 2, 1.2, DiscretizationParams(half_width=5.0))


def test_unknown_scheme():
    with pytest.raises(ValueError):
        DiscretizationParams(scheme="fd6")


# --------------------------------------------------------------------------
# L1 and L2


@pytest.mark.parametrize("p,omega", [(1, 2.0), (2, 1.5), (3, 3.0), (5, 1.2), (4, 2.5)])
def test_L1_least_eigenvalue(p, omega):
    num = numeric_spectrum(1.0, p, omega, k=3)
    assert num[0] == pytest.approx(analytic_L1_least(p, omega), rel=1e-5)


@pytest.mark.parametrize("p,omega", [(1, 2.0), (2, 1.5), (3, 3.0)])
def test_L1_bound_states(p, omega):
    exact = analytic_L1_eigenvalues(p, omega)
    num = numeric_spectrum(1.0, p, omega, k=len(exact))
    assert num == pytest.approx(exact, abs=1e-5 * max(1.0, omega))
    # ground state, zero mode, then (for p = 1) one more below the edge omega - 1
    assert exact[0] < 0 and exact[1] == pytest.approx(0.0, abs=1e-12)


def test_L1_p1_three_bound_states():
    ev = analytic_L1_eigenvalues(1, 2.0)
    assert ev == pytest.approx([-5 / 4, 0.0, 3 / 4])
    assert all(v < 1.0 for v in ev)


@settings(max_examples=20)
@given(st.integers(1, 6), st.floats(1.1, 4.0))
def test_L1_least_formula_from_ladder(p, omega):
    assert analytic_L1_eigenvalues(p, omega)[0] == pytest.approx(analytic_L1_least(p, omega), rel=1e-12)


@settings(max_examples=15)
@given(st.integers(1, 5), st.floats(1.2, 3.0), st.floats(-0.5, 0.9))
def test_L2_scaling_chain(p, omega, det):
    num = numeric_spectrum(det, p, omega, k=2)
    exact = analytic_L2_eigenvalues(p, omega, det)
    edge = omega - 1.0
    if exact and exact[0] < 0.95 * edge:
        assert num[0] == pytest.approx(exact[0], abs=1e-5 * omega)
    elif not exact:
        # no bound state: the bottom sits at (or just above) the continuum edge
        assert num[0] >= edge - 1e-6 * omega
    # barely bound states decay too slowly for a fixed box and are not compared


@pytest.mark.parametrize("p", [1, 2, 5])
def test_L2_least_monotone_in_det(p):
    dets = np.linspace(-0.2, 0.6, 9)
    least = [numeric_spectrum(d, p, 2.0, k=1)[0] for d in dets]
    assert np.all(np.diff(least) <= 1e-10)


@pytest.mark.parametrize("p", [1, 2, 3, 5, 8])
def test_L2_threshold_closed_form(p):
    b = l2_positivity_threshold(p)
    assert l2_s(p, b) == pytest.approx(2.0 / p)
    # lowest L2 eigenvalue is exactly zero at the threshold
    assert analytic_L2_eigenvalues(p, 1.7, b)[0] == pytest.approx(0.0, abs=1e-12)
    assert analytic_L2_eigenvalues(p, 1.7, b * 0.99)[0] > 0
    assert analytic_L2_eigenvalues(p, 1.7, b * 1.01)[0] < 0


@pytest.mark.parametrize("p,omega", [(1, 2.0), (2, 1.5), (3, 3.0), (5, 1.2), (6, 1.5)])
def test_zero_mode(p, omega):
    assert zero_mode_residual(p, omega) <= 1e-6


# --------------------------------------------------------------------------
# the coupled operator


CASES = [
    (example1(1, 1.0, 1.0), 1.0, 2.0),
    (example2(1), 1.0, 1.5),
    (example3(2, 1.0, 1.0), 0.0, 2.0),
    (example4(2.0), 1.0, 1.8),
    (example4(0.5), 0.0, 1.3),
]


@pytest.mark.parametrize("H,mu,omega", CASES)
def test_block_equals_diagonal(H, mu, omega):
    r = make_ratio(H, mu)
    det = build_M(H, r).det
    k = 6
    block = block_eigenvalues(H, r, omega, k=k)
    diag = np.sort(np.concatenate([numeric_spectrum(1.0, H.p, omega, k=k), numeric_spectrum(det, H.p, omega, k=k)]))
    assert np.max(np.abs(block - diag[:k])) <= 1e-8


def test_block_rejects_spectral_scheme():
    H = example3(2, 1.0, 1.0)
    with pytest.raises(Unsupported):
        block_eigenvalues(H, make_ratio(H, 0.0), 2.0, DiscretizationParams(scheme="spectral"))


@pytest.mark.parametrize("H,mu,omega", CASES[:2] + CASES[3:])
def test_report_flags_when_criterion_holds(H, mu, omega):
    rep = linearized_report(H, make_ratio(H, mu), omega)
    if rep.detM < 1.0 / (H.p + 1):
        assert rep.flags_ok and rep.n_negative == 1 and rep.has_zero_mode and rep.L2_positive
    else:
        assert not rep.L2_positive


def test_report_flags_when_criterion_fails():
    H = example3(2, 1.0, 1.0)
    rep = linearized_report(H, make_ratio(H, 1.0), 2.0)
    assert rep.detM == pytest.approx(1.0)
    assert rep.n_negative == 2 and not rep.flags_ok
    d = rep.to_dict()
    assert set(d) >= {"numeric_L1_eigs", "numeric_L2_eigs", "cont_edge", "zero_mode_residual"}


def test_report_least_matches_formula():
    H = example1(1, 1.0, 1.0)
    rep = linearized_report(H, make_ratio(H, 1.0), 2.0)
    assert rep.numeric_L1_eigs[0] == pytest.approx(-1.25, abs=1e-4)
    assert rep.analytic_L1_least == -1.25
    assert [r.mu for r in find_ratios(H) if r.admissible] == [1.0]


def test_wave_independent_of_hu():
    # phi_0 only depends on p and omega
    a = WaveProfile(3, 2.0, 0.5).potential(np.linspace(-3, 3, 7))
    b = WaveProfile(3, 2.0, 7.0).potential(np.linspace(-3, 3, 7))
    assert np.allclose(a, b)
