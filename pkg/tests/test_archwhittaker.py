import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy import special
from scipy.linalg import expm

from arith_sw import archwhittaker as aw
from arith_sw.quadrature import QuadratureError, QuadratureSpec


# ---------------------------------------------------------------- gamma

def test_siegel_gamma_examples():
    assert aw.siegel_gamma(1, 2.5) == pytest.approx(special.gamma(2.5), rel=1e-14)
    assert aw.siegel_gamma(2, 1.5) == pytest.approx(math.pi / 2, rel=1e-14)
    assert aw.siegel_gamma(2, 2) == pytest.approx(math.pi / 2, rel=1e-14)
    with pytest.raises(ValueError):
        aw.siegel_gamma(2, 0.5)


@given(st.integers(2, 5), st.floats(2.6, 6.0))
def test_siegel_gamma_recursions(n, b):
    r = aw.rho(n)
    lhs = aw.siegel_gamma(n - 1, b) * aw.siegel_gamma(1, b + 1 - r)
    assert lhs == pytest.approx(math.pi ** (-(n - 1) / 2) * aw.siegel_gamma(n, b), rel=1e-12)
    lhs = aw.siegel_gamma(n - 1, b + aw.rho(n - 1)) * aw.siegel_gamma(1, b + r)
    assert lhs == pytest.approx(math.pi ** (-(n - 1) / 2) * aw.siegel_gamma(n, b + r), rel=1e-12)


# ---------------------------------------------------------------- eta

def test_eta_elementary():
    assert aw.eta([[2]], [[math.pi]], 1, 2).value == pytest.approx(math.exp(-2 * math.pi) / 4, rel=1e-13)


@given(st.floats(0.3, 3.0), st.floats(-2.0, 2.0).filter(lambda t: abs(t) > 0.05),
       st.floats(0.2, 3.0), st.floats(0.2, 3.0))
def test_eta_n1_matches_kummer(y, t, a, b):
    q = aw.eta([[y]], [[t]], a, b).value
    assert q == pytest.approx(aw.eta_n1_closed(y, t, a, b), rel=1e-9)


def test_eta_divergent_range():
    with pytest.raises(ValueError):
        aw.eta([[1]], [[1]], 0.0, 1.0)
    with pytest.raises(ValueError):
        aw.eta(np.eye(2), np.eye(2), 1.5, 0.5)
    with pytest.raises(NotImplementedError):
        aw.eta(np.eye(3), np.eye(3), 3, 3)


def test_eta_reports_missed_tolerance():
    spec = QuadratureSpec(rel_tol=1e-15, max_level=3)
    with pytest.raises(QuadratureError):
        aw.eta(np.eye(2), np.diag([1.0, -1.0]), 1.7, 1.3, spec)


@pytest.mark.parametrize("T,y", [
    (np.eye(2), np.eye(2)),
    (np.array([[1.0, 0.3], [0.3, 2.0]]), np.array([[1.2, 0.4], [0.4, 0.9]])),
])
@pytest.mark.parametrize("beta", [0.7, 1.0, 2.3])
def test_eta_positive_definite_closed_form(T, y, beta):
    q = aw.eta(y, T, 1.5, beta).value
    exact = aw.siegel_gamma(2, beta) * np.linalg.det(y) ** (-beta) * math.exp(-np.trace(y @ T))
    assert q == pytest.approx(exact, rel=1e-8)


@given(st.integers(0, 10 ** 6))
def test_eta_transformation(seed):
    rng = np.random.default_rng(seed)
    n = 2
    s = rng.normal(size=(n, n)) + 1.5 * np.eye(n)
    if np.linalg.det(s) < 0:
        s[:, 0] = -s[:, 0]
    y = np.diag(rng.uniform(0.5, 2.0, size=n))
    T = np.diag([rng.uniform(0.3, 1.5), -rng.uniform(0.3, 1.5)])
    a, b = rng.uniform(1.2, 2.5, size=2)
    # strongly anisotropic y needs finer levels than the default rule allows
    assume(np.linalg.cond(s.T @ y @ s) < 50 and np.linalg.cond(s @ T @ s.T) < 50)
    lhs = aw.eta(s.T @ y @ s, T, a, b).value
    rhs = np.linalg.det(s) ** (2 * (1.5 - a - b)) * aw.eta(y, s @ T @ s.T, a, b).value
    assert lhs == pytest.approx(rhs, rel=1e-6)


# ---------------------------------------------------------------- Whittaker values

def test_whittaker_examples():
    pt = aw.RadialPoint(np.eye(1))
    w = aw.whittaker_real([[1]], pt, 0, 1)
    assert w.value == pytest.approx(-2j * math.pi * math.exp(-2 * math.pi), rel=1e-14)
    pt2 = aw.RadialPoint(np.eye(2))
    w2 = aw.whittaker_closed_posdef(np.eye(2), pt2, 1.5)
    expect = (-2j * math.pi) ** 3 * 2 ** -0.5 / aw.siegel_gamma(2, 1.5) * math.exp(-4 * math.pi)
    assert w2 == pytest.approx(expect, rel=1e-14)


def test_whittaker_quadrature_route_agrees_with_closed_form():
    for T, y in [([[1.0]], [[1.0]]), ([[1.0, 0.3], [0.3, 2.0]], [[1.2, 0.4], [0.4, 0.9]])]:
        pt = aw.RadialPoint(np.array(y))
        q = aw.whittaker_posdef_quadrature(T, pt)
        c = aw.whittaker_closed_posdef(T, pt, aw.rho(pt.n))
        assert abs(q.value - c) / abs(c) < (1e-8 if pt.n == 1 else 1e-6)


def test_whittaker_at_identity_transformation():
    pt = aw.RadialPoint(np.eye(1), u=np.zeros((1, 1)))
    assert aw.whittaker_real([[-0.7]], pt, 0.8, 1.0).value == \
        aw.whittaker_real([[-0.7]], aw.RadialPoint(np.eye(1)), 0.8, 1.0).value


@given(st.floats(-1.5, 1.5).filter(lambda t: abs(t) > 0.05), st.floats(-1.0, 1.0),
       st.floats(0.3, 3.0), st.floats(0.3, 1.5))
def test_covariance_under_radial_action(t, u, v, s):
    """det(v)^(-k/2) W_T(g_tau, s) = e(Tu) |a|^(-s) W_{aTa}(1, s) at n = 1, k = 1."""
    a = math.sqrt(v)
    lhs = v ** -0.5 * aw.whittaker_real([[t]], aw.RadialPoint([[v]], u=[[u]]), s, 1.0).value
    rhs = cmath.exp(2j * math.pi * t * u) * a ** -s * \
        aw.whittaker_real([[a * a * t]], aw.RadialPoint(np.eye(1)), s, 1.0).value
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_vanishing_bound():
    assert aw.whittaker_vanishing_bound((3, 0)) == 0
    assert aw.whittaker_vanishing_bound((2, 1)) == 1
    assert aw.whittaker_vanishing_bound((1, 2)) == 1
    assert aw.whittaker_vanishing_bound((0, 3)) == 2


def test_signature_11_outside_convergence():
    # kappa = rho_2 gives beta = s/2, so the integral only converges for s > 1
    pt = aw.RadialPoint(np.eye(2))
    with pytest.raises(ValueError):
        aw.whittaker_real(np.diag([1.0, -1.0]), pt, 0.9, 1.5)


def test_ill_conditioned_y_reports_failure():
    Y = np.array([[3.42025006, 1.54128283], [1.54128283, 0.69726143]])
    with pytest.raises(QuadratureError):
        aw.eta(Y, np.diag([1.29324311, -0.79103896]), 1.9144718, 1.2358268)


# ---------------------------------------------------------------- Kummer U, Ei

def test_kummer_examples():
    assert aw.kummer_U(1, 1, 1).value == pytest.approx(math.e * special.exp1(1), rel=1e-10)
    for a in (0.5, 1.0, 2.5):
        assert aw.kummer_U(a, a + 1, 3.0).value == pytest.approx(3.0 ** -a, rel=1e-12)
    # z^a U(a, b, z) = 1 - a (a - b + 1) / z + O(z^-2)
    assert aw.kummer_U(1.5, 0.7, 1e3).value * 1e3 ** 1.5 == pytest.approx(1 - 2.7e-3, abs=2e-5)
    with pytest.raises(ValueError):
        aw.kummer_U(-1, 1, 1)


@given(st.floats(0.2, 4), st.floats(-2, 4), st.floats(0.05, 40))
def test_kummer_matches_scipy(a, b, z):
    assert aw.kummer_U(a, b, z).value == pytest.approx(float(mpmath.hyperu(a, b, z)), rel=1e-9)


def test_exp_integral_examples():
    assert aw.exp_integral(-1) == pytest.approx(-0.2193839343955203, rel=1e-14)
    from scipy.integrate import quad
    ref = quad(lambda u: math.exp(-2 * u) / u, 1, math.inf)[0]
    assert -aw.exp_integral(-2) == pytest.approx(ref, rel=1e-12)
    t = 500.0
    assert -aw.exp_integral(-t) * t * math.exp(t) == pytest.approx(1, abs=3e-3)
    with pytest.raises(ValueError):
        aw.exp_integral(0.5)


@given(st.floats(1e-6, 600))
def test_exp_integral_matches_scipy(t):
    assert aw.exp_integral(-t) == pytest.approx(special.expi(-t), rel=1e-13)


# ---------------------------------------------------------------- derivative, heights

def test_derivative_examples():
    for t in (-1.0, -0.5):
        z = 4 * math.pi * abs(t)
        expect = -1j * math.pi * math.exp(-2 * math.pi * abs(t)) * float(mpmath.hyperu(1, 1, z))
        assert aw.whittaker_derivative_n1(t) == pytest.approx(expect, rel=1e-10)
    with pytest.raises(ValueError):
        aw.whittaker_derivative_n1(1.0)


@pytest.mark.parametrize("t", [-0.5, -1.0])
def test_derivative_numeric_cross_check(t):
    num = aw.whittaker_derivative_n1_numeric(t)
    assert num == pytest.approx(aw.whittaker_derivative_n1(t), rel=1e-6)


def test_height_arch():
    assert aw.height_arch_n1(-1) == pytest.approx(special.exp1(4 * math.pi), rel=1e-13)
    # E1(x) = -gamma - log x + x + O(x^2)
    x = 4 * math.pi * 1e-3
    assert aw.height_arch_n1(-1e-3) == pytest.approx(-aw.EULER_GAMMA - math.log(x) + x, abs=1e-4)
    with pytest.raises(ValueError):
        aw.height_arch_n1(0.5)


# ---------------------------------------------------------------- asymptotics

def test_asymptotic_limits():
    assert aw.eta_asymptotic_limit([[2.0]], 2.0, 1.5) == pytest.approx(special.gamma(1.5) * 4)
    assert aw.eta_asymptotic_limit([[-1.0]], 2.0, 1.5) == 0
    with pytest.raises(ValueError):
        aw.eta_asymptotic_check([[0.0]], 2.0, 1.5, [10.0])


def test_asymptotic_n1_residual_decays_like_inverse_y():
    # e^{Ty} y^b eta = Gamma(b)(2T)^(a-1) (1 + (a-1) b / (2 T y) + ...)
    rep = aw.eta_asymptotic_check([[2.0]], 2.0, 1.5, [50.0, 100.0, 200.0])
    for y, r in zip(rep.schedule, rep.residuals):
        assert r == pytest.approx(1.5 / (4 * y), rel=1e-9)


def test_asymptotic_n2_monotone():
    rep = aw.eta_asymptotic_check(np.diag([2.0, -1.0]), 3.0, 2.5, [10.0, 20.0, 40.0], y_rest=[[1.0]])
    r = rep.residuals
    assert r[0] > r[1] > r[2]
    assert r[2] * 40 == pytest.approx(r[1] * 20, rel=0.02)


# ---------------------------------------------------------------- Green function

def test_green_m0():
    g = aw.green_xi([1.0, 0.2], gram=[[-2, 0], [0, -3.0]], m=0)
    T = -g.R / 2
    assert g.xi0 == pytest.approx(-aw.exp_integral(4 * math.pi * T))
    assert g.majorant == pytest.approx(g.R)


def test_green_m1_explicit_projection():
    g = aw.green_xi([1.0, 0.0, 0.0], [1j], [[-2.0]], m=1)
    assert g.R == pytest.approx(0.5)
    assert g.xi == pytest.approx(-aw.exp_integral(-math.pi))


def test_green_on_divisor():
    from scipy.linalg import null_space
    g0 = [[-2.0]]
    z = [0.3 + 1.1j]
    plane = aw.negative_plane(z, g0)
    x = null_space(plane.T @ aw.full_gram(g0))[:, 0]  # x orthogonal to the negative plane of z
    with pytest.raises(aw.OnDivisor):
        aw.green_xi(x, z, g0)


@given(st.integers(0, 10 ** 6))
def test_green_invariance(seed):
    rng = np.random.default_rng(seed)
    g0 = [[-2.0]]
    G = aw.full_gram(g0)
    x = rng.normal(size=3)
    z = [complex(rng.normal(), rng.uniform(0.3, 2.0))]
    a = rng.normal(size=(3, 3)) * 0.4
    h = expm(np.linalg.solve(G, a - a.T))
    e1 = aw.green_xi(x, z, g0)
    e2 = aw.green_xi(h @ x, aw.act_on_tube(h, z, g0), g0)
    assert e2.R == pytest.approx(e1.R, rel=1e-9, abs=1e-12)
    assert e2.xi == pytest.approx(e1.xi, rel=1e-8, abs=1e-300)
    assert e1.majorant == pytest.approx(float(x @ G @ x) + 2 * e1.R)
