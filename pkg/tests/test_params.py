import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wpfp.errors import ConfigError, InvalidParameter
from wpfp.kernel import coefficients_at
from wpfp.params import (ELLIPTICITY, LINDBLAD, ParameterSet, derived_constants, kappa,
                         lindblad_check, read_parameter_file, require_admissible)
from wpfp.phase_state import PhaseGrid, random_state, seeded_rng


@st.composite
def admissible(draw, dim=1):
    sigma = draw(st.floats(0.1, 3.0))
    beta = draw(st.floats(0.0, 3.0))
    gamma = draw(st.floats(-1.0, 1.0))
    slack = draw(st.floats(1.0, 3.0))
    alpha = slack * (gamma ** 2 + beta ** 2 / 16) / sigma + draw(st.floats(1e-3, 1.0))
    return ParameterSet(alpha, beta, gamma, sigma, dim=dim)


def test_accepts_plain_diffusion():
    assert lindblad_check(ParameterSet(1, 0, 0, 1)).accepted


def test_rejects_strong_friction_naming_lindblad():
    res = lindblad_check(ParameterSet(1, 5, 0, 1))
    assert not res
    assert res.clause == LINDBLAD
    assert "Lindblad" in res.message


def test_rejects_boundary_of_ellipticity():
    res = lindblad_check(ParameterSet(1, 0, 1, 1))
    assert not res
    assert res.clauses == (ELLIPTICITY,)


def test_require_admissible_raises():
    with pytest.raises(InvalidParameter, match="Lindblad"):
        require_admissible(ParameterSet(1, 5, 0, 1))


@pytest.mark.parametrize("field, value", [
    ("alpha", -1.0), ("beta", -0.5), ("sigma", 0.0), ("hbar", 0.0),
    ("alpha", math.nan), ("sigma", math.inf),
])
def test_invalid_fields(field, value):
    kwargs = dict(alpha=1.0, beta=0.0, gamma=0.0, sigma=1.0)
    kwargs[field] = value
    with pytest.raises(InvalidParameter):
        ParameterSet(**kwargs)


def test_invalid_dim():
    with pytest.raises(InvalidParameter):
        ParameterSet(1, 0, 0, 1, dim=2)


@given(st.floats(0.0, 5.0), st.floats(0.0, 5.0), st.floats(-3.0, 3.0), st.floats(0.01, 5.0))
def test_check_matches_inequalities(alpha, beta, gamma, sigma):
    p = ParameterSet(alpha, beta, gamma, sigma)
    expected = (alpha * sigma >= gamma ** 2 + beta ** 2 / 16) and alpha * sigma > gamma ** 2
    assert lindblad_check(p).accepted == expected


@pytest.mark.parametrize("beta, sigma, dim, expected", [
    (2.0, 1.0, 3, 12.0), (0.0, 1.0, 3, 9.0), (2.0, 1.0, 1, 4.0),
])
def test_kappa_values(beta, sigma, dim, expected):
    alpha = 10.0
    assert kappa(ParameterSet(alpha, beta, 0.0, sigma, dim=dim)) == pytest.approx(expected)


def test_derived_constants():
    dc = derived_constants(ParameterSet(1, 1, 0, 1, dim=3))
    assert dc.kappa == pytest.approx(1.5 + 9)
    assert dc.mass_growth_rate == 3.0


@given(admissible(), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_kappa_monotone(p, d_beta, d_sigma):
    # increasing sigma keeps the condition; increasing beta needs more alpha
    bigger = ParameterSet(p.alpha * 4 + 1, p.beta + d_beta, p.gamma, p.sigma + d_sigma)
    assert kappa(bigger) >= kappa(p)


@settings(max_examples=40, deadline=None)
@given(admissible())
def test_admissible_gives_positive_determinant(p):
    for t in np.geomspace(1e-3, 10.0, 13):
        assert coefficients_at(p, t).f_t > 0


def _generator_form(u, grid, p):
    """``A u`` by spectral derivatives on the periodic grid."""
    kx = grid.k[:, None]
    ke = grid.eta[None, :]

    def deriv(vals, sym_x, sym_v):
        spec = np.fft.fftshift(np.fft.fft2(vals))
        return np.fft.ifft2(np.fft.ifftshift(spec * sym_x * sym_v)).real

    ix = 1j * kx
    iv = 1j * ke
    ix[0] = 0.0
    iv[:, 0] = 0.0
    v = grid.v[None, :]
    return (-v * deriv(u, ix, 1.0) + p.beta * deriv(v * u, 1.0, iv)
            + p.sigma * deriv(u, 1.0, (1j * ke) ** 2) + 2 * p.gamma * deriv(u, ix, iv)
            + p.alpha * deriv(u, (1j * kx) ** 2, 1.0))


@settings(max_examples=25, deadline=None)
@given(admissible(), st.integers(0, 2 ** 32 - 1))
def test_kappa_bounds_weighted_dissipation_in_1d(p, seed):
    # <A u, u> in the (1 + v^4)-weighted L2 never exceeds kappa |u|^2
    grid = PhaseGrid(1, 128, 128, 4.0, 12.0)
    u = random_state(grid, seeded_rng(seed)).values
    weight = 1.0 + grid.v[None, :] ** 4
    au = _generator_form(u, grid, p)
    ratio = np.sum(weight * au * u) / np.sum(weight * u * u)
    assert ratio <= kappa(p) + 1e-9


def test_from_mapping_and_file(tmp_path):
    path = tmp_path / "p.cfg"
    path.write_text("alpha = 1\nbeta = 0.5  # friction\ngamma = 0\nsigma = 2\ndim = 3\n")
    p = read_parameter_file(path)
    assert (p.alpha, p.beta, p.gamma, p.sigma, p.hbar, p.dim) == (1.0, 0.5, 0.0, 2.0, 1.0, 3)


def test_from_mapping_rejects_unknown_and_missing():
    with pytest.raises(ConfigError, match="unknown"):
        ParameterSet.from_mapping({"alpha": "1", "beta": "0", "gamma": "0", "sigma": "1",
                                   "mass": "1"})
    with pytest.raises(ConfigError, match="missing"):
        ParameterSet.from_mapping({"alpha": "1"})
    with pytest.raises(ConfigError):
        ParameterSet.from_mapping({"alpha": "one", "beta": "0", "gamma": "0", "sigma": "1"})
