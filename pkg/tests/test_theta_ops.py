import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wpfp.errors import ConsistencyError
from wpfp.evolve import field_of
from wpfp.phase_state import (PhaseGrid, WignerState, d_dv, gaussian_state, norm_L2, norm_X,
                              random_state, seeded_rng)
from wpfp.suites import random_potential, semiclassical_order
from wpfp.theta_ops import (classical_force, gamma_apply, omega_apply, shifted_velocity_average,
                            theta_application, theta_apply, theta_hbar_apply, theta_via_gamma,
                            weighted_decomposition, x_divergence)

GRID = PhaseGrid(1, 128, 128, math.pi, 10.0)
seeds = st.integers(0, 2 ** 32 - 1)


def _case(seed, grid=GRID):
    rng = seeded_rng(seed)
    return random_state(grid, rng), random_potential(rng, grid)


def _l2(values, grid=GRID):
    return math.sqrt(np.sum(values ** 2) * grid.hx * grid.hv)


def test_constant_potential_gives_zero():
    w = random_state(GRID, seeded_rng(1))
    assert not theta_apply(np.full(GRID.Nx, 3.0), w).values.any()
    assert not theta_via_gamma(np.zeros(GRID.Nx), w).values.any()


def test_quadratic_potential_gives_transport_term():
    grid = PhaseGrid(1, 64, 128, 6.0, 8.0)
    w = gaussian_state(grid, 0.5, -0.4, 0.8, 0.9)
    out = theta_apply(lambda x: 0.5 * x * x, w)
    expected = grid.x[:, None] * d_dv(w)
    assert np.max(np.abs(out.values - expected)) <= 1e-6 * np.max(np.abs(expected))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_skew_symmetry(seed):
    w, (V, _, _) = _case(seed)
    th = theta_apply(V, w).values
    assert abs(np.sum(th * w.values) * GRID.hx * GRID.hv) <= 1e-10 * norm_L2(w) ** 2


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_linear_in_potential_and_state(seed, a, b):
    rng = seeded_rng(seed)
    w1, w2 = random_state(GRID, rng), random_state(GRID, rng)
    V1, V2 = random_potential(rng, GRID)[0], random_potential(rng, GRID)[0]
    combo_w = WignerState(GRID, a * w1.values + b * w2.values)
    lhs = theta_apply(V1, combo_w).values
    rhs = a * theta_apply(V1, w1).values + b * theta_apply(V1, w2).values
    scale = 1e-12 * (abs(a) + abs(b) + 1) * np.max(np.abs(theta_apply(V1, w1).values) + 1)
    assert np.max(np.abs(lhs - rhs)) <= scale
    lhs = theta_apply(a * V1 + b * V2, w1).values
    rhs = a * theta_apply(V1, w1).values + b * theta_apply(V2, w1).values
    assert np.max(np.abs(lhs - rhs)) <= scale


def test_output_is_real_with_small_residue():
    w, (V, _, _) = _case(5)
    app = theta_application(V, w)
    assert app.residue <= 1e-12 * np.max(np.abs(w.values))
    assert app.mode == "standard"
    assert theta_application(V, w, 0.5).mode == "hbar-scaled"


def test_large_residue_is_reported():
    # a complex-valued "potential" produces an imaginary output
    w = gaussian_state(GRID, 0.0, 0.0, 0.5, 1.0)
    with pytest.raises(ConsistencyError):
        theta_hbar_apply(lambda x: 1j * np.sin(x), w)


def test_unit_hbar_is_bit_identical():
    w, (V, _, _) = _case(9)
    assert np.array_equal(theta_hbar_apply(V, w, 1.0).values, theta_apply(V, w).values)


def test_semiclassical_order():
    assert semiclassical_order() == pytest.approx(2.0, abs=0.2)


def test_small_hbar_approaches_classical_force():
    grid = PhaseGrid(1, 128, 128, math.pi, 8.0)
    w = gaussian_state(grid, 0.0, 0.5, 0.5, 1.0)
    V = np.cos(grid.x)
    ref = classical_force(-np.sin(grid.x), w).values
    errs = [_l2(theta_hbar_apply(V, w, h).values - ref, grid) for h in (0.2, 0.02)]
    assert errs[1] <= 1.1e-2 * errs[0]


# ---------------------------------------------------------------- Gamma

def test_gamma_with_constant_field():
    w = random_state(GRID, seeded_rng(2))
    np.testing.assert_allclose(gamma_apply(np.full(GRID.Nx, -1.3), w).values, -1.3 * w.values,
                               atol=1e-13)


def test_gamma_bounded_by_sup_field():
    rng = seeded_rng(17)
    for _ in range(100):
        w = random_state(GRID, rng)
        _, E, _ = random_potential(rng, GRID)
        assert norm_L2(gamma_apply(E, w)) <= np.max(np.abs(E)) * norm_L2(w) * (1 + 1e-12)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_gamma_commutes_with_velocity_derivative(seed):
    w, (_, E, _) = _case(seed)
    lhs = d_dv(gamma_apply(E, w))
    rhs = gamma_apply(E, w.copy(d_dv(w))).values
    assert _l2(lhs - rhs) <= 1e-8 * _l2(rhs)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_divergence_form(seed):
    w, (V, E, _) = _case(seed)
    diff = theta_via_gamma(E, w).values - theta_apply(V, w).values
    assert _l2(diff) <= 1e-8 * norm_L2(w)


@pytest.mark.parametrize("s", [0.5, 0.1])
def test_shifted_average_is_an_x_divergence(s):
    # int (d_v g)(x - s v, v) dv = s d_x int g(x - s v, v) dv for g = Gamma[E] w
    w, (V, E, _) = _case(21)
    lhs = shifted_velocity_average(theta_apply(V, w).values, GRID, s)
    g = gamma_apply(E, w).values
    rhs = s * shifted_velocity_average(x_divergence(g, GRID), GRID, s)
    assert np.max(np.abs(lhs - rhs)) <= 1e-6 * np.max(np.abs(lhs))


# ---------------------------------------------------------------- Omega and the weighted decomposition

def test_omega_of_zero():
    w = random_state(GRID, seeded_rng(4))
    assert not omega_apply(np.zeros(GRID.Nx), w).any()


def test_omega_output_is_imaginary():
    w, (_, E, _) = _case(6)
    out = omega_apply(E, w)
    assert np.max(np.abs(out.real)) <= 1e-12 * np.max(np.abs(out.imag))


@pytest.mark.parametrize("Nv", [128, 256])
def test_weighted_decomposition(Nv):
    grid = PhaseGrid(1, 128, Nv, math.pi, 10.0)
    rng = seeded_rng(31)
    for _ in range(10):
        w = random_state(grid, rng)
        V, V1, V2 = random_potential(rng, grid)
        lhs = grid.v[None, :] ** 2 * theta_apply(V, w).values
        resid = _l2(lhs - weighted_decomposition(V, V1, V2, w), grid)
        assert resid <= 1e-8 * norm_L2(w)


@pytest.mark.xfail(strict=True, reason="with a +1/4 coefficient and the bare omega multiplier "
                                        "the identity has an O(1) residual")
def test_weighted_decomposition_as_printed():
    w, (V, V1, V2) = _case(8)
    v = GRID.v[None, :]
    lhs = v ** 2 * theta_apply(V, w).values
    rhs = (0.25 * theta_apply(V2, w).values
           + omega_apply(V1, w.copy(v * w.values)).real
           + theta_apply(V, w.copy(v * v * w.values)).values)
    assert _l2(lhs - rhs) <= 1e-8 * norm_L2(w)


def test_weighted_norm_bound():
    # |Theta[V] u|_X <= (2|V| + 1/2 |V''|) |u|_2 + (2|V| + 2|V'|) |u|_X, sup norms in x,
    # and the ratio against (|u|_X + |d_v u|_X) |z|_X stays within one order of magnitude
    rng = seeded_rng(99)
    shape = []
    for _ in range(50):
        z, u = random_state(GRID, rng), random_state(GRID, rng)
        pot = field_of(z)
        out = norm_X(theta_apply(pot.V, u))
        V0, V1 = np.max(np.abs(pot.V)), np.max(np.abs(pot.E))
        V2 = np.max(np.abs(pot.n - pot.n.mean()))
        bound = (2 * V0 + 0.5 * V2) * norm_L2(u) + (2 * V0 + 2 * V1) * norm_X(u)
        assert out <= bound
        shape.append(out / ((norm_X(u) + norm_X(u.copy(d_dv(u)))) * norm_X(z)))
    assert np.all(np.isfinite(shape))
    assert max(shape) / min(shape) <= 50
