"""Pseudo-differential operators acting on Wigner states through the velocity transform.

``theta_apply`` multiplies ``F_v w`` by ``i dV(x, eta)`` with
``dV = V(x + eta/2) - V(x - eta/2)``.  Since ``dV`` is real and odd in ``eta``
the result is real and the operator is skew-symmetric.  The unpaired Nyquist
column in ``eta`` is dropped for odd symbols, which keeps both properties
exact on the grid.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .phase_state import (WignerState, apply_v_multiplier, apply_x_multiplier, odd_symbol,
                          shift_x)
from .potential import delta_plus_V, delta_V, symbol_W

RESIDUE_TOL = 1e-8


@dataclass
class ThetaApplication:
    output: WignerState
    residue: float
    mode: str


def _finish(w, result, mode, check=True):
    residue = float(np.max(np.abs(result.imag))) if result.size else 0.0
    scale = float(np.max(np.abs(w.values))) if w.values.size else 0.0
    if check and residue > RESIDUE_TOL * max(scale, 1e-300):
        raise ConsistencyError(
            f"imaginary residue {residue:.3e} exceeds {RESIDUE_TOL:g} * max|w| = {scale:.3e}")
    out = WignerState(w.grid, result.real.copy(), w.time)
    out.meta["imag_residue"] = residue
    out.meta["mode"] = mode
    return out


def _odd_in_eta(symbol):
    symbol = np.array(symbol, dtype=complex)
    symbol[:, 0] = 0.0
    return symbol


def theta_symbol(V, grid, hbar=1.0):
    return _odd_in_eta(1j * delta_V(V, grid, hbar=hbar) / hbar)


def theta_hbar_apply(V, w, hbar=1.0, check=True):
    """Scaled operator with symbol ``i (V(x + hbar eta/2) - V(x - hbar eta/2)) / hbar``."""
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    result = apply_v_multiplier(w.grid, w.values, theta_symbol(V, w.grid, hbar))
    return _finish(w, result, "standard" if hbar == 1.0 else "hbar-scaled", check)


def theta_apply(V, w, check=True):
    return theta_hbar_apply(V, w, 1.0, check)


def theta_application(V, w, hbar=1.0):
    out = theta_hbar_apply(V, w, hbar)
    return ThetaApplication(out, out.meta["imag_residue"], out.meta["mode"])


def classical_force(E, w):
    """``E(x) d_v w``, the small-hbar limit of the scaled operator."""
    grid = w.grid
    dv = apply_v_multiplier(grid, w.values, odd_symbol(grid.eta)[None, :]).real
    return WignerState(grid, np.asarray(E)[:, None] * dv, w.time)


def gamma_apply(E, w, W=None):
    """Multiplier ``W(x, eta)``, the r-average of ``E(x - r eta)``."""
    if W is None:
        W = symbol_W(E, w.grid).W
    result = apply_v_multiplier(w.grid, w.values, W)
    out = WignerState(w.grid, result.real.copy(), w.time)
    out.meta["imag_residue"] = float(np.max(np.abs(result.imag)))
    return out


def theta_via_gamma(E, w, W=None):
    """Velocity divergence of ``gamma_apply``."""
    g = gamma_apply(E, w, W)
    dv = apply_v_multiplier(w.grid, g.values, odd_symbol(w.grid.eta)[None, :]).real
    return WignerState(w.grid, dv, w.time)


def omega_apply(F, w):
    """Multiplier ``i (F(x + eta/2) + F(x - eta/2))``; returns the complex result.

    The symbol is imaginary and even in ``eta``, so real input produces a purely
    imaginary output; callers that need a real operator use ``1j * omega_apply``.
    """
    symbol = 1j * delta_plus_V(F, w.grid)
    return apply_v_multiplier(w.grid, w.values, symbol)


def weighted_decomposition(V, V1, V2, w):
    """Right-hand side of the commutation of ``v^2`` through ``Theta[V]``.

    ``v^2 Theta[V] w = -1/4 Theta[V''] w + (i Omega[V'])(v w) + Theta[V](v^2 w)``

    ``V1``, ``V2`` are the first and second derivatives of ``V`` (grid
    samples or callables matching ``V``).
    """
    v = w.grid.v[None, :]
    vw = WignerState(w.grid, v * w.values, w.time)
    v2w = WignerState(w.grid, v * v * w.values, w.time)
    middle = (1j * omega_apply(V1, vw)).real
    return (-0.25 * theta_apply(V2, w).values + middle + theta_apply(V, v2w).values)


def shifted_velocity_average(values, grid, s):
    """``int g(x - s v, v) dv`` for grid data ``g``."""
    shifted = shift_x(grid, values, s * grid.v[None, :])
    return shifted.sum(axis=1) * grid.hv


def x_divergence(values, grid):
    return apply_x_multiplier(grid, values, odd_symbol(grid.k)[:, None]).real
