import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.integrate import solve_ivp

from wpfp.errors import DomainError, ResolutionWarning
from wpfp.kernel import (CharacteristicFlow, brute_force_propagate, coefficient_series,
                         coefficients_at, density_kernel, determinant_gap, grad_v_log_G,
                         gradient_bound_check, gradient_ratio_sup, green_F, green_G,
                         log_green_G, phi, pointwise_gradient_ratio, propagate_linear,
                         state_gradient_norms)
from wpfp.params import ParameterSet
from wpfp.phase_state import PhaseGrid, d_dv, gaussian_state, norm_L2

UNIT = ParameterSet(1.0, 0.0, 0.0, 1.0)
FULL = ParameterSet(1.0, 1.0, 0.3, 1.0)


@st.composite
def admissible(draw):
    sigma = draw(st.floats(0.2, 2.0))
    beta = draw(st.floats(0.0, 2.0))
    gamma = draw(st.floats(-0.8, 0.8))
    alpha = 1.5 * (gamma ** 2 + beta ** 2 / 16) / sigma + draw(st.floats(0.05, 1.0))
    return ParameterSet(alpha, beta, gamma, sigma)


def _mp_coefficients(p, t):
    """lambda, nu, mu as 50-digit quadratures of their defining integrals."""
    mp.mp.dps = 50
    a, b, g, s = (mp.mpf(x) for x in (p.alpha, p.beta, p.gamma, p.sigma))
    t = mp.mpf(t)

    def psi(r):
        return mp.expm1(b * r) / b if b != 0 else r

    nu = s * mp.quad(lambda r: mp.e ** (2 * b * r), [0, t])
    mu = mp.quad(lambda r: 2 * s * mp.e ** (b * r) * psi(r) - 2 * g * mp.e ** (b * r), [0, t])
    lam = a * t + mp.quad(lambda r: s * psi(r) ** 2 - 2 * g * psi(r), [0, t])
    return lam, nu, mu


# ---------------------------------------------------------------- coefficients

def test_nu_without_friction_is_linear():
    assert coefficients_at(ParameterSet(1, 0, 0, 1), 0.5).nu_t == pytest.approx(0.5, rel=1e-15)


def test_nu_with_friction_closed_form():
    nu = coefficients_at(ParameterSet(1, 1, 0, 1), 1.0).nu_t
    assert nu == pytest.approx((math.e ** 2 - 1) / 2, rel=1e-14)
    assert coefficient_series(ParameterSet(1, 1, 0, 1), 1.0, terms=20)[0] == pytest.approx(nu, rel=1e-12)


def test_small_time_determinant():
    t = 1e-3
    ratio = coefficients_at(UNIT, t).f_t / (4 * t * t)
    assert 0.99 <= ratio <= 1.01


def test_nonpositive_time_rejected():
    for t in (0.0, -1.0, math.nan):
        with pytest.raises(DomainError):
            coefficients_at(UNIT, t)


@settings(max_examples=60, deadline=None)
@given(admissible(), st.floats(1e-4, 0.5))
def test_closed_forms_match_series(p, t):
    kc = coefficients_at(p, t)
    nu, mu, lam = coefficient_series(p, t, terms=30)
    assert kc.nu_t == pytest.approx(nu, rel=1e-11)
    assert kc.lambda_t == pytest.approx(lam, rel=1e-10)
    assert kc.mu_t == pytest.approx(mu, rel=1e-10, abs=1e-14 * (abs(p.gamma) * t + t * t))


@pytest.mark.parametrize("params, t", [
    (ParameterSet(1.5625, 3.0, 0.0, 1.0), 10.0),
    (ParameterSet(1.0, 1.0, 0.3, 1.0), 10.0),
    (ParameterSet(2.0, 0.5, -0.7, 1.3), 3.0),
    (ParameterSet(1.0, 1.0, 0.3, 1.0), 1e-3),
    (ParameterSet(1.0, 1e-7, 0.2, 1.0), 0.7),
])
def test_determinant_against_extended_precision(params, t):
    lam, nu, mu = _mp_coefficients(params, t)
    kc = coefficients_at(params, t)
    assert kc.f_t == pytest.approx(float(4 * lam * nu - mu * mu), rel=1e-11)
    assert kc.lambda_t == pytest.approx(float(lam), rel=1e-12)
    assert kc.nu_t == pytest.approx(float(nu), rel=1e-12)


@pytest.mark.parametrize("order", [1, 2, 3])
@pytest.mark.parametrize("z", [-30.0, -1.0001, -0.9999, -1e-9, 0.0, 1e-6, 0.5, 0.9999, 1.0001, 12.0])
def test_phi_against_extended_precision(order, z):
    mp.mp.dps = 40
    zz = mp.mpf(z)
    if z == 0:
        ref = 1 / mp.factorial(order)
    else:
        ref = (mp.e ** zz - sum(zz ** k / mp.factorial(k) for k in range(order))) / zz ** order
    assert phi(order, z) == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("z", [-40.0, -2.0001, -1.9999, 0.0, 1e-8, 1.9999, 2.0001, 30.0])
def test_determinant_gap_against_extended_precision(z):
    mp.mp.dps = 60
    zz = mp.mpf(z)
    if z == 0:
        ref = mp.mpf(1) / 12
    else:
        p1 = lambda u: mp.expm1(u) / u  # noqa: E731
        ref = (p1(2 * zz) - p1(zz) ** 2) / zz ** 2
    assert determinant_gap(z) == pytest.approx(float(ref), rel=1e-13)


# ---------------------------------------------------------------- flow

@given(st.floats(0.0, 3.0), st.floats(0.01, 5.0), st.floats(-5, 5), st.floats(-5, 5))
def test_flow_inverse_is_identity(beta, t, x, v):
    flow = CharacteristicFlow(beta, t)
    xb, vb = flow.inverse(x, v)
    xf, vf = flow.apply(xb, vb)
    assert xf == pytest.approx(x, abs=1e-9 * (1 + abs(x) + abs(v)) * math.exp(beta * t))
    assert vf == pytest.approx(v, abs=1e-12 * (1 + abs(v)))


@given(st.floats(0.0, 3.0), st.floats(0.01, 3.0))
def test_backward_jacobian(beta, t):
    flow = CharacteristicFlow(beta, t)
    ex = np.array(flow.inverse(1.0, 0.0)) - np.array(flow.inverse(0.0, 0.0))
    ev = np.array(flow.inverse(0.0, 1.0)) - np.array(flow.inverse(0.0, 0.0))
    det = ex[0] * ev[1] - ex[1] * ev[0]
    assert det == pytest.approx(flow.jacobian_inverse(), rel=1e-12)
    assert CharacteristicFlow(beta, t, dim=3).jacobian_inverse() == pytest.approx(det ** 3)


def test_flow_without_friction_is_shear():
    x, v = CharacteristicFlow(0.0, 2.0).apply(1.0, 3.0)
    assert (x, v) == (7.0, 3.0)


# ---------------------------------------------------------------- kernels

def test_green_F_at_origin():
    kc = coefficients_at(FULL, 0.4)
    assert green_F(kc, 0.0, 0.0) == pytest.approx(1 / (2 * math.pi * math.sqrt(kc.f_t)), rel=1e-14)


@pytest.mark.parametrize("params, t", [(UNIT, 0.5), (FULL, 0.3), (FULL, 2.0)])
def test_green_F_normalized(params, t):
    kc = coefficients_at(params, t)
    Lx = 12 * math.sqrt(2 * kc.lambda_t)
    Lv = 12 * math.sqrt(2 * kc.nu_t)
    nodes, weights = np.polynomial.legendre.leggauss(400)
    x, wx = Lx * nodes, Lx * weights
    v, wv = Lv * nodes, Lv * weights
    total = wx @ green_F(kc, x[:, None], v[None, :]) @ wv
    assert total == pytest.approx(1.0, abs=1e-6)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_green_F_even(x, v):
    kc = coefficients_at(FULL, 0.7)
    assert green_F(kc, x, v) == pytest.approx(green_F(kc, -x, -v), rel=1e-14)


def test_green_F_three_dimensions_factorizes():
    kc = coefficients_at(FULL, 0.5)
    x = np.array([0.3, -0.2, 0.9])
    v = np.array([-0.4, 0.1, 0.5])
    prod = np.prod([green_F(kc, x[i], v[i]) for i in range(3)])
    assert green_F(kc, x, v, dim=3) == pytest.approx(prod, rel=1e-13)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1), st.floats(-1, 1))
def test_green_G_without_friction(x, v, x0, v0):
    t = 0.6
    kc = coefficients_at(UNIT, t)
    assert green_G(kc, x, v, x0, v0) == pytest.approx(green_F(kc, x - v * t - x0, v - v0),
                                                        rel=1e-13)


def test_green_G_integrates_to_one():
    kc = coefficients_at(ParameterSet(1, 1, 0, 1), 0.3)
    x = np.linspace(-20, 20, 1601)
    v = np.linspace(-20, 20, 1601)
    vals = green_G(kc, x[:, None], v[None, :], 0.4, -0.7)
    total = integrate.simpson(integrate.simpson(vals, x=v, axis=1), x=x)
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("x", [-2.0, -0.3, 0.0, 0.8, 3.0])
def test_velocity_marginal_of_G(x):
    kc = coefficients_at(FULL, 0.8)
    x0, v0 = 0.2, 0.9
    val, _ = integrate.quad(lambda v: green_G(kc, x, v, x0, v0), -np.inf, np.inf,
                            epsabs=0, epsrel=1e-11)
    assert val == pytest.approx(float(density_kernel(kc, x, x0, v0)), rel=1e-9)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_grad_v_log_G_against_difference_quotient(x, v):
    kc = coefficients_at(FULL, 0.5)
    h = 1e-5
    fd = (log_green_G(kc, x, v + h, 0.1, -0.2) - log_green_G(kc, x, v - h, 0.1, -0.2)) / (2 * h)
    assert grad_v_log_G(kc, x, v, 0.1, -0.2) == pytest.approx(float(fd), rel=1e-6, abs=1e-6)


# ---------------------------------------------------------------- propagator

def _moments(w):
    X, V = w.grid.mesh()
    m = w.values.sum()
    return np.array([(f * w.values).sum() / m for f in (X, V, X * X, X * V, V * V)])


def test_propagator_moments_follow_moment_equations():
    # d<x>/dt = <v>, d<v>/dt = -beta <v>,  d<x^2>/dt = 2<xv> + 2 alpha,
    # d<xv>/dt = <v^2> - beta <xv> + 2 gamma,  d<v^2>/dt = -2 beta <v^2> + 2 sigma
    p = ParameterSet(1.0, 0.7, 0.4, 0.8)
    grid = PhaseGrid(1, 256, 256, 16.0, 12.0)
    w0 = gaussian_state(grid, 0.5, -0.3, 1.0, 0.8)
    t = 0.6
    a, b, g, s = p.alpha, p.beta, p.gamma, p.sigma

    def rhs(_, y):
        _, mv, _, xv, vv = y
        return [mv, -b * mv, 2 * xv + 2 * a, vv - b * xv + 2 * g, -2 * b * vv + 2 * s]

    sol = solve_ivp(rhs, (0, t), _moments(w0), rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(_moments(propagate_linear(w0, p, t)), sol.y[:, -1], atol=1e-10)


def test_propagator_against_kernel_quadrature_with_friction():
    grid = PhaseGrid(1, 64, 64, 8.0, 8.0)
    w0 = gaussian_state(grid, -0.5, 0.5, 0.9, 1.1)
    fast = propagate_linear(w0, FULL, 0.4)
    slow = brute_force_propagate(w0, FULL, 0.4)
    err = np.linalg.norm(fast.values - slow.values) / np.linalg.norm(slow.values)
    assert err <= 1e-4


def test_short_time_is_nearly_identity():
    grid = PhaseGrid(1, 128, 128, 8.0, 8.0)
    w0 = gaussian_state(grid, 0.0, 0.0, 1.0, 1.0)
    with pytest.warns(ResolutionWarning):
        wt = propagate_linear(w0, UNIT, 1e-6)
    assert norm_L2(w0.copy(wt.values - w0.values)) <= 1e-3 * norm_L2(w0)
    assert wt.time == pytest.approx(1e-6)


@pytest.mark.parametrize("params", [UNIT, FULL])
def test_mass_conserved(params):
    grid = PhaseGrid(1, 128, 128, 8.0, 8.0)
    w0 = gaussian_state(grid, 0.3, -0.2, 0.8, 0.9)
    m0 = w0.values.sum()
    assert propagate_linear(w0, params, 0.5).values.sum() == pytest.approx(m0, rel=1e-8)


@pytest.mark.parametrize("t, s", [(0.1, 0.1), (0.1, 0.2), (0.2, 0.1), (0.2, 0.2)])
def test_semigroup_property(t, s):
    grid = PhaseGrid(1, 128, 128, 8.0, 8.0)
    w0 = gaussian_state(grid, 0.3, -0.2, 0.7, 0.8)
    once = propagate_linear(w0, FULL, t + s)
    twice = propagate_linear(propagate_linear(w0, FULL, s), FULL, t)
    assert np.linalg.norm(once.values - twice.values) <= 1e-6 * np.linalg.norm(once.values)


def test_grid_mismatch_rejected():
    from wpfp.kernel import LinearPropagator
    prop = LinearPropagator(UNIT, PhaseGrid(1, 32, 32, 4.0, 4.0), 0.5)
    with pytest.raises(ValueError):
        prop(gaussian_state(PhaseGrid(1, 64, 64, 4.0, 4.0)))


# ---------------------------------------------------------------- smoothing

@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 1.0))
def test_closed_form_sup_dominates_samples(t):
    sup = gradient_ratio_sup(FULL, t)
    sampled = pointwise_gradient_ratio(FULL, t, n=201)
    assert sampled <= sup * (1 + 1e-12)
    assert sampled >= 0.99 * sup


def test_pointwise_bound_stable_in_time():
    rep = gradient_bound_check(UNIT, np.geomspace(1e-3, 1e-1, 9))
    assert np.isfinite(rep.b_estimate)
    assert rep.ratio_sup.max() / rep.ratio_sup.min() <= 1.01
    assert rep.largest_t_within_b == pytest.approx(1e-1)
    assert rep.slope == pytest.approx(-0.5, abs=0.05)


def test_smooth_data_have_bounded_velocity_gradient():
    grid = PhaseGrid(1, 128, 128, 8.0, 8.0)
    w0 = gaussian_state(grid, 0.0, 0.0, 1.0, 1.0)
    g0 = math.sqrt(np.sum(d_dv(w0) ** 2) * grid.hx * grid.hv)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        norms = state_gradient_norms(w0, UNIT, np.geomspace(1e-4, 1e-1, 7))
    assert np.all(norms <= g0 * (1 + 1e-9))
