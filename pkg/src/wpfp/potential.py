"""Hartree potential, field, potential differences and the averaged-gradient symbol.

Two solver modes:

* ``torus``: spectral inversion of ``-V'' = n`` on the periodic x-grid after
  removing the mean of ``n`` (uniform neutralizing background).
* ``radial``: three-dimensional radially symmetric densities on ``r >= 0``,
  using the enclosed charge ``Q(r)``.  Here ``V = n * 1/(4 pi |x|)`` solves
  ``-Lap V = n`` and the field ``E = grad V`` has radial component
  ``-Q(r)/(4 pi r^2)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NeutralityError
from .phase_state import odd_symbol

TORUS = "torus"
RADIAL = "radial"
SOBOLEV_3D = (3 * math.pi) ** -0.5 * (2.0 / special.gamma(1.5)) ** (1.0 / 3.0)


@dataclass
class PotentialField:
    n: np.ndarray
    V: np.ndarray
    E: np.ndarray
    mode: str = TORUS
    time: float = 0.0
    r: np.ndarray = None
    Lx: float = None
    residual: float = 0.0

    @property
    def total_charge(self):
        if self.mode != RADIAL:
            raise ValueError("total charge is defined in radial mode")
        return float(4 * math.pi * integrate.simpson(self.n * self.r ** 2, x=self.r))

    def V_at(self, radius):
        """Radial potential at arbitrary radii; Coulomb tail beyond the table."""
        radius = np.asarray(radius, dtype=float)
        inside = np.interp(radius, self.r, self.V)
        q = self.total_charge
        tail = q / (4 * math.pi * np.maximum(radius, self.r[-1]))
        return np.where(radius <= self.r[-1], inside, tail)


def _torus_k(N, Lx):
    return np.pi / Lx * np.arange(-N // 2, N // 2)


def solve_poisson(n, mode=TORUS, Lx=None, r=None, neutralize=True, time=0.0):
    n = np.asarray(n, dtype=float)
    if mode == TORUS:
        return _solve_torus(n, Lx, neutralize, time)
    if mode == RADIAL:
        return _solve_radial(n, r, time)
    raise ValueError(f"unknown Poisson mode {mode!r}")


def _solve_torus(n, Lx, neutralize, time):
    if Lx is None:
        raise ValueError("torus mode needs the half-width Lx")
    N = n.size
    mean = n.mean()
    scale = max(np.max(np.abs(n)), 1e-300)
    if not neutralize and abs(mean) > 1e-12 * scale:
        raise NeutralityError(f"density has mean {mean:.3e}; a torus Poisson solve needs zero mean")
    k = _torus_k(N, Lx)
    n_hat = np.fft.fftshift(np.fft.fft(n - mean))
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(k == 0, 0.0, 1.0 / (k * k))
    V_hat = n_hat * inv
    V = np.fft.ifft(np.fft.ifftshift(V_hat)).real
    E = np.fft.ifft(np.fft.ifftshift(V_hat * odd_symbol(k))).real
    # -V'' recomputed on the projected (mean-free, non-Nyquist) space
    lap = np.fft.ifft(np.fft.ifftshift(V_hat * k * k)).real
    proj = np.fft.ifft(np.fft.ifftshift(np.where(k == 0, 0.0, n_hat))).real
    residual = float(np.linalg.norm(lap - proj) / max(np.linalg.norm(n), 1e-300))
    return PotentialField(n, V, E, TORUS, time, Lx=Lx, residual=residual)


def _solve_radial(n, r, time):
    if r is None:
        raise ValueError("radial mode needs the radius table r")
    r = np.asarray(r, dtype=float)
    if r[0] != 0.0 or np.any(np.diff(r) <= 0):
        raise ValueError("radius table must start at 0 and increase")
    charge = 4 * math.pi * integrate.cumulative_simpson(n * r * r, x=r, initial=0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        E = np.where(r > 0, -charge / (4 * math.pi * r * r), 0.0)
    # outer part: int_r^inf n(rho) rho d rho, the density is negligible past r[-1]
    cum = integrate.cumulative_simpson(n * r, x=r, initial=0.0)
    outer = cum[-1] - cum
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = np.where(r > 0, charge / (4 * math.pi * r), 0.0)
    V = inner + outer
    return PotentialField(n, V, E, RADIAL, time, r=r)


# ---------------------------------------------------------------- differences

def _spectral(values):
    return np.fft.fftshift(np.fft.fft(values))


def _half_shift_kernels(k, eta, hbar):
    arg = 0.5 * hbar * k[:, None] * np.abs(eta)[None, :]
    odd = 2j * np.sin(arg) * np.sign(eta)[None, :]
    even = 2.0 * np.cos(arg)
    odd[0] = 0.0  # unpaired Nyquist row
    return odd, even


def delta_V(V, grid=None, eta=None, hbar=1.0, x=None):
    """``V(x + hbar eta/2) - V(x - hbar eta/2)`` over (x, eta).

    ``V`` is either grid samples on the torus, or a callable evaluated
    directly at the points ``x`` (free-space window mode).
    """
    if callable(V):
        x = np.asarray(grid.x if x is None else x, dtype=float)[:, None]
        eta = np.asarray(grid.eta if eta is None else eta, dtype=float)[None, :]
        return V(x + 0.5 * hbar * eta) - V(x - 0.5 * hbar * eta)
    eta = grid.eta if eta is None else np.asarray(eta, dtype=float)
    odd, _ = _half_shift_kernels(grid.k, eta, hbar)
    spec = _spectral(np.asarray(V, dtype=float))[:, None] * odd
    return np.fft.ifft(np.fft.ifftshift(spec, axes=0), axis=0).real


def delta_plus_V(V, grid=None, eta=None, hbar=1.0, x=None):
    """``V(x + hbar eta/2) + V(x - hbar eta/2)`` over (x, eta)."""
    if callable(V):
        x = np.asarray(grid.x if x is None else x, dtype=float)[:, None]
        eta = np.asarray(grid.eta if eta is None else eta, dtype=float)[None, :]
        return V(x + 0.5 * hbar * eta) + V(x - 0.5 * hbar * eta)
    eta = grid.eta if eta is None else np.asarray(eta, dtype=float)
    _, even = _half_shift_kernels(grid.k, eta, hbar)
    spec = _spectral(np.asarray(V, dtype=float))[:, None] * even
    return np.fft.ifft(np.fft.ifftshift(spec, axes=0), axis=0).real


# ---------------------------------------------------------------- symbol W

@dataclass
class SymbolW:
    W: np.ndarray
    nodes: int
    change: float


def _shifted_average(E_hat, k, eta, r_nodes, r_weights):
    out = np.zeros((k.size, eta.size))
    for r, wt in zip(r_nodes, r_weights):
        phase = np.exp(-1j * k[:, None] * r * eta[None, :])
        phase[0] = np.cos(k[0] * r * eta)
        vals = np.fft.ifft(np.fft.ifftshift(E_hat[:, None] * phase, axes=0), axis=0).real
        out += wt * vals
    return out


def symbol_W(E, grid, eta=None, tol=1e-10, start_nodes=8, max_nodes=4096):
    """``W(x, eta) = int_{-1/2}^{1/2} E(x - r eta) dr`` by Gauss-Legendre in r."""
    eta = grid.eta if eta is None else np.asarray(eta, dtype=float)
    E_hat = _spectral(np.asarray(E, dtype=float))
    k = grid.k
    nodes = start_nodes
    prev = None
    change = math.inf
    while nodes <= max_nodes:
        xs, ws = np.polynomial.legendre.leggauss(nodes)
        cur = _shifted_average(E_hat, k, eta, 0.5 * xs, 0.5 * ws)
        if prev is not None:
            change = float(np.max(np.abs(cur - prev)))
            if change < tol:
                return SymbolW(cur, nodes, change)
        prev = cur
        nodes *= 2
    return SymbolW(prev, nodes // 2, change)


# ---------------------------------------------------------------- dipole kernel

_DIPOLE_CACHE = {}


def _dipole_inner_near(delta, p, epsrel):
    # int_0^1 (xi^2 - zeta^2)^(1-p) dzeta at xi = 1 + delta, written with
    # zeta = 1 - b and b = delta (e^s - 1) so the near-singularity is resolved
    def integrand(s):
        b = delta * math.expm1(s)
        return (delta * math.exp(s)) ** (2 - p) * (2 + delta - b) ** (1 - p)

    val, _ = integrate.quad(integrand, 0.0, math.log1p(1.0 / delta),
                            limit=200, epsabs=0, epsrel=epsrel)
    return val


def _dipole_inner_far(xi, p):
    return xi ** (2 - 2 * p) * special.hyp2f1(p - 1, 0.5, 1.5, 1.0 / (xi * xi))


def _dipole_J(p, xi_cut, epsrel):
    """``int_1^inf int_-1^1 (xi^2 - zeta^2)^(1-p) dzeta dxi``."""
    m = max(1.0, 1.0 / (3.0 - p))

    def near(u):
        # xi = 1 + u^m cancels the (xi - 1)^(2-p) endpoint growth
        if u == 0.0:
            return 0.0 if m > 1 else _dipole_inner_near(1e-300, p, epsrel)
        return _dipole_inner_near(u ** m, p, epsrel) * m * u ** (m - 1)

    body, _ = integrate.quad(near, 0.0, 1.0, limit=200, epsabs=0, epsrel=epsrel)
    far, _ = integrate.quad(_dipole_inner_far, 2.0, xi_cut, args=(p,),
                            limit=200, epsabs=0, epsrel=epsrel)
    # tail: binomial series of (1 - zeta^2/xi^2)^(1-p), integrated termwise
    tail = 0.0
    coef = 1.0
    for k in range(400):
        term = coef / (2 * k + 1) * xi_cut ** (3 - 2 * p - 2 * k) / (2 * p + 2 * k - 3)
        tail += term
        if abs(term) < 1e-17 * abs(tail):
            break
        coef *= (p - 1 + k) / (k + 1)
    return 2.0 * (body + far + tail)


def dipole_constant(p, refinement=0):
    """``int_{R^3} dx / (|x - e/2| |x + e/2|)^p`` for a unit vector ``e``.

    Evaluated in prolate spheroidal coordinates with foci at ``+-e/2``;
    ``refinement`` moves the series cut and tightens the quadrature.
    """
    p = float(p)
    if not 1.5 < p < 3.0:
        raise DomainError(f"dipole kernel norm needs 3/2 < p < 3, got {p}")
    key = (p, refinement)
    if key not in _DIPOLE_CACHE:
        xi_cut = 8.0 * 2 ** refinement
        J = _dipole_J(p, xi_cut, 1e-10 * 0.01 ** refinement)
        _DIPOLE_CACHE[key] = 2 * math.pi * 2.0 ** (2 * p - 3) * J
    return _DIPOLE_CACHE[key]


def dipole_kernel_norm(eta, p, refinement=0):
    """``L^p`` norm of ``x -> 1/(|x - eta/2| |x + eta/2|)`` in three dimensions."""
    const = dipole_constant(p, refinement)
    size = float(np.linalg.norm(np.atleast_1d(eta)))
    return size ** (3.0 / p - 1.0) * const ** (1.0 / p)


# ---------------------------------------------------------------- radial norms

def radial_lp_norm(r, values, p):
    """``L^p(R^3)`` norm of a radial function tabulated on ``r``."""
    vals = np.abs(np.asarray(values, dtype=float))
    if np.isinf(p):
        return float(vals.max())
    return float((4 * math.pi * integrate.simpson(vals ** p * r * r, x=r)) ** (1.0 / p))


def radial_delta_V_sup(field, eta_size, extent=None, n=121):
    """Sup over x of ``|V(x + eta/2) - V(x - eta/2)|`` for a radial potential.

    Uses axial symmetry about the direction of ``eta``.
    """
    extent = field.r[-1] if extent is None else extent
    z = np.linspace(-extent, extent, 2 * n + 1)[:, None]
    rho = np.linspace(0.0, extent, n)[None, :]
    plus = np.hypot(z + 0.5 * eta_size, rho)
    minus = np.hypot(z - 0.5 * eta_size, rho)
    return float(np.max(np.abs(field.V_at(plus) - field.V_at(minus))))


def gaussian_radial_density(r, width=1.0, mass=1.0):
    """Isotropic Gaussian density in three dimensions."""
    r = np.asarray(r, dtype=float)
    return mass * (2 * math.pi * width ** 2) ** -1.5 * np.exp(-0.5 * (r / width) ** 2)


def shell_radial_density(r, width, radius, mass=1.0):
    """Gaussian shell profile normalized on the table ``r``."""
    r = np.asarray(r, dtype=float)
    prof = np.exp(-0.5 * ((r - radius) / width) ** 2)
    return mass * prof / (4 * math.pi * integrate.simpson(prof * r * r, x=r))
