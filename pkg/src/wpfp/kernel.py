"""Gaussian Green's function of the linear Wigner-Fokker-Planck operator.

In Fourier variables ``(k, eta)`` the linear equation is first order,

    d/dt w_hat = (k - beta eta) d/deta w_hat - (alpha k^2 + 2 gamma k eta + sigma eta^2) w_hat,

so the solution is the initial transform evaluated at the foot of the
characteristic, ``eta0 = exp(-beta t) eta + theta(t) k``, times a Gaussian
``exp(-(lambda k^2 - mu k eta0 + nu eta0^2))``.  The coefficient functions
below are the time integrals of the quadratic symbol along that curve.

All coefficient functions are written through

    phi_1(z) = (e^z - 1)/z,  phi_2(z) = (e^z - 1 - z)/z^2,  phi_3(z) = (e^z - 1 - z - z^2/2)/z^3

which are entire, so ``beta = 0`` is not a special case.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import DomainError, ResolutionWarning
from .params import require_admissible
from .phase_state import WignerState

_SERIES_TERMS = 30
_FACT = [math.factorial(n) for n in range(_SERIES_TERMS + 4)]
_FACT_GAP = [math.factorial(m + 4) for m in range(_SERIES_TERMS)]


def phi(order, z):
    """``phi_order(z)`` for order 1..3, accurate across the removable point."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < 1.0
    if np.any(small):
        zs = z[small]
        acc = np.zeros_like(zs)
        for n in range(_SERIES_TERMS - 1, -1, -1):
            acc = acc * zs + 1.0 / _FACT[n + order]
        out[small] = acc
    big = ~small
    if np.any(big):
        zb = z[big]
        val = np.expm1(zb) / zb
        for k in range(2, order + 1):
            val = (val - 1.0 / _FACT[k - 1]) / zb
        out[big] = val
    return out if out.ndim else float(out)


def determinant_gap(z):
    """``(phi_1(2z) - phi_1(z)**2) / z**2``, entire with value 1/12 at zero."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < 2.0
    if np.any(small):
        zs = z[small]
        acc = np.zeros_like(zs)
        for m in range(_SERIES_TERMS - 1, -1, -1):
            acc = acc * zs + (2.0 ** (m + 2) * m + 2.0) / _FACT_GAP[m]
        out[small] = acc
    big = ~small
    if np.any(big):
        zb = z[big]
        out[big] = (phi(1, 2 * zb) - phi(1, zb) ** 2) / (zb * zb)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class KernelCoefficients:
    t: float
    lambda_t: float
    nu_t: float
    mu_t: float
    f_t: float
    R_t: float
    vartheta_t: float
    beta: float = 0.0

    @property
    def growth(self):
        """``exp(beta t)``; velocity stretch of the backward flow."""
        return math.exp(self.beta * self.t)

    @property
    def back_shear(self):
        """``(exp(beta t) - 1)/beta``; shear of the backward flow."""
        return self.t * phi(1, self.beta * self.t)


def coefficients_at(p, t):
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"kernel coefficients need t > 0, got {t}")
    a, b, g, s = p.alpha, p.beta, p.gamma, p.sigma
    z = b * t
    nu = s * t * phi(1, 2 * z)
    mu = s * t * t * phi(1, z) ** 2 - 2.0 * g * t * phi(1, z)
    lam = (a * t + s * t ** 3 * (4.0 * phi(3, 2 * z) - 2.0 * phi(3, z))
           - 2.0 * g * t * t * phi(2, z))
    vartheta = t * phi(1, -z)
    R = (2.0 * a * t + s * t ** 3 * (8.0 * phi(3, -2 * z) - 4.0 * phi(3, -z))
         + 4.0 * g * t * t * phi(2, -z))
    # 4 lam nu - mu^2 split into its two nonnegative parts; the direct
    # difference cancels catastrophically once exp(beta t) is large
    f = (4.0 * (a * s - g * g) * t * t * phi(1, 2 * z)
         + 4.0 * (s + g * b) ** 2 * t ** 4 * determinant_gap(z))
    return KernelCoefficients(t, lam, nu, mu, f, R, vartheta, b)


def coefficient_series(p, t, terms=20):
    """Independent power-series evaluation in ``t`` of nu, mu, lambda.

    Built term by term from the Taylor coefficients of the exponentials, used
    as a cross-check of the closed forms.
    """
    a, b, g, s = p.alpha, p.beta, p.gamma, p.sigma
    nu = mu = 0.0
    lam = a * t
    for n in range(terms):
        # nu = sigma * int_0^t exp(2 beta r) dr
        nu += s * (2 * b) ** n * t ** (n + 1) / math.factorial(n + 1)
        # mu = 2 sigma int_0^t e^{beta r}(e^{beta r}-1)/beta dr - 2 gamma int_0^t e^{beta r} dr
        mu_sig = 2 * s * t ** (n + 2) * (2 ** (n + 1) - 1) * b ** n / math.factorial(n + 2)
        mu += mu_sig - 2 * g * b ** n * t ** (n + 1) / math.factorial(n + 1)
        # lambda = int_0^t [sigma ((e^{br}-1)/b)^2 - 2 gamma (e^{br}-1)/b] dr + alpha t
        lam += s * t ** (n + 3) * (2 ** (n + 2) - 2) * b ** n / math.factorial(n + 3)
        lam -= 2 * g * b ** n * t ** (n + 2) / math.factorial(n + 2)
    return nu, mu, lam


# ---------------------------------------------------------------- flow

@dataclass(frozen=True)
class CharacteristicFlow:
    """Free transport with friction, ``dx/dt = v, dv/dt = -beta v``."""

    beta: float
    t: float
    dim: int = 1

    def _shear(self, t):
        return t * phi(1, -self.beta * t)

    def apply(self, x, v, t=None):
        t = self.t if t is None else t
        x, v = np.asarray(x, float), np.asarray(v, float)
        return x + v * self._shear(t), v * math.exp(-self.beta * t)

    def inverse(self, x, v):
        return self.apply(x, v, -self.t)

    def jacobian_inverse(self):
        """Determinant of the backward map in ``dim`` dimensions."""
        return math.exp(self.dim * self.beta * self.t)


# ---------------------------------------------------------------- kernels

def _quad_form(kc, x, v, dim):
    if dim == 1:
        xx, vv, xv = x * x, v * v, x * v
    else:
        xx = np.sum(x * x, axis=-1)
        vv = np.sum(v * v, axis=-1)
        xv = np.sum(x * v, axis=-1)
    return (kc.nu_t * xx + kc.lambda_t * vv + kc.mu_t * xv) / kc.f_t


def log_green_F(kc, x, v, dim=1):
    if not kc.f_t > 0:
        raise DomainError(f"degenerate kernel: f = {kc.f_t}")
    x, v = np.asarray(x, float), np.asarray(v, float)
    lognorm = -dim * math.log(2 * math.pi) - 0.5 * dim * math.log(kc.f_t)
    return lognorm - _quad_form(kc, x, v, dim)


def green_F(kc, x, v, dim=1):
    return np.exp(log_green_F(kc, x, v, dim))


def log_green_G(kc, x, v, x0, v0, dim=1):
    flow = CharacteristicFlow(kc.beta, kc.t, dim)
    xb, vb = flow.inverse(x, v)
    return dim * kc.beta * kc.t + log_green_F(kc, xb - x0, vb - v0, dim)


def green_G(kc, x, v, x0, v0, dim=1):
    return np.exp(log_green_G(kc, x, v, x0, v0, dim))


def density_kernel(kc, x, x0, v0, dim=1):
    """Velocity integral of ``G``: a Gaussian of variance ``R`` in x."""
    z = (np.asarray(x, float) - x0 - kc.vartheta_t * v0)
    zz = z * z if dim == 1 else np.sum(z * z, axis=-1)
    return (2 * math.pi * kc.R_t) ** (-dim / 2) * np.exp(-0.5 * zz / kc.R_t)


def grad_v_log_G(kc, x, v, x0, v0):
    """``d/dv log G`` in one dimension."""
    a, b = kc.growth, kc.back_shear
    yx = np.asarray(x, float) - b * np.asarray(v, float) - x0
    yv = a * np.asarray(v, float) - v0
    cx = kc.mu_t * a - 2.0 * kc.nu_t * b
    cv = 2.0 * kc.lambda_t * a - kc.mu_t * b
    return -(cx * yx + cv * yv) / kc.f_t


# ---------------------------------------------------------------- propagator

def resolution_ok(kc, grid):
    return (math.sqrt(2.0 * kc.lambda_t) >= 2.0 * grid.hx
            and math.sqrt(2.0 * kc.nu_t) >= 2.0 * grid.hv)


class LinearPropagator:
    """``exp(tA)`` on a fixed grid as a precomputed Fourier operator."""

    def __init__(self, p, grid, t, check_resolution=True):
        require_admissible(p)
        self.p, self.grid, self.t = p, grid, float(t)
        kc = coefficients_at(p, t)
        self.coefficients = kc
        if check_resolution and not resolution_ok(kc, grid):
            warnings.warn(
                f"kernel widths sqrt(2 lambda)={math.sqrt(2 * kc.lambda_t):.3g}, "
                f"sqrt(2 nu)={math.sqrt(2 * kc.nu_t):.3g} are below two grid cells "
                f"(hx={grid.hx:.3g}, hv={grid.hv:.3g})", ResolutionWarning, stacklevel=2)
        k = grid.k[:, None]
        eta = grid.eta[None, :]
        contraction = math.exp(-p.beta * kc.t)
        eta0 = contraction * eta + kc.vartheta_t * k
        q = kc.lambda_t * k * k - kc.mu_t * k * eta0 + kc.nu_t * eta0 * eta0
        band = np.abs(eta0) <= math.pi / grid.hv * (1 + 1e-12)
        self._gauss = np.where(band, np.exp(-q), 0.0)
        v = grid.v
        self._shear_phase = np.exp(-1j * kc.vartheta_t * k * v[None, :])
        self._to_eta = np.exp(-1j * contraction * v[:, None] * grid.eta[None, :]) * grid.hv
        mx = np.arange(-grid.Nx // 2, grid.Nx // 2)
        mv = np.arange(-grid.Nv // 2, grid.Nv // 2)
        self._sx = np.where(mx % 2 == 0, 1.0, -1.0)
        self._sv = np.where(mv % 2 == 0, 1.0, -1.0)

    def __call__(self, w):
        if w.grid != self.grid:
            raise ValueError("state grid does not match propagator grid")
        grid = self.grid
        spec_x = np.fft.fftshift(np.fft.fft(w.values, axis=0), axes=0)
        spec_x *= (self._sx * grid.hx)[:, None]
        spec = (spec_x * self._shear_phase) @ self._to_eta
        spec *= self._gauss
        spec *= np.outer(self._sx, self._sv)
        out = np.fft.ifft2(np.fft.ifftshift(spec)) / (grid.hx * grid.hv)
        return WignerState(grid, out.real, w.time + self.t)


def propagate_linear(w, p, t, check_resolution=True):
    return LinearPropagator(p, w.grid, t, check_resolution=check_resolution)(w)


# ---------------------------------------------------------------- brute force

def brute_force_propagate(w, p, t, cutoff=40.0):
    """Direct phase-space quadrature of ``w0 * G``, x-periodic images summed.

    O(N^4); intended as an oracle on small grids.
    """
    require_admissible(p)
    kc = coefficients_at(p, t)
    grid = w.grid
    a, b = kc.growth, kc.back_shear
    period = 2.0 * grid.Lx
    reach = (2 * grid.Lx + abs(b) * grid.Lv
             + abs(kc.mu_t) * (a + 1) * grid.Lv / (2 * kc.nu_t)
             + math.sqrt(cutoff * kc.f_t / kc.nu_t))
    images = int(math.ceil(reach / period)) + 1
    prefactor = a / (2 * math.pi * math.sqrt(kc.f_t))
    coef = (kc.nu_t / kc.f_t, kc.lambda_t / kc.f_t, kc.mu_t / kc.f_t)
    vals = _accel.green_sum(np.ascontiguousarray(w.values), grid.x, grid.v,
                            grid.hx * grid.hv, period, coef, a, b,
                            prefactor, images, cutoff)
    return WignerState(grid, vals, w.time + t)


# ---------------------------------------------------------------- smoothing

def pointwise_gradient_ratio(p, t, z_extent=8.0, n=161):
    """Sup of ``|d_v G| sqrt(t) / G(t, x/2, v/2, x0/2, v0/2)`` on sampled points.

    Depends only on the displacement ``y`` from the backward flow, which is
    sampled on a square of ``z_extent`` kernel widths.
    """
    kc = coefficients_at(p, t)
    a, b = kc.growth, kc.back_shear
    sx = math.sqrt(2 * kc.lambda_t) * z_extent
    sv = math.sqrt(2 * kc.nu_t) * z_extent
    yx, yv = np.meshgrid(np.linspace(-sx, sx, n), np.linspace(-sv, sv, n), indexing="ij")
    cx = kc.mu_t * a - 2.0 * kc.nu_t * b
    cv = 2.0 * kc.lambda_t * a - kc.mu_t * b
    grad = np.abs(cx * yx + cv * yv) / kc.f_t
    qf = (kc.nu_t * yx * yx + kc.lambda_t * yv * yv + kc.mu_t * yx * yv) / kc.f_t
    # G(y)/G(y/2) = exp(-Q + Q/4); prefactors cancel
    return float(np.max(grad * math.sqrt(t) * np.exp(-0.75 * qf)))


def gradient_ratio_sup(p, t):
    """Closed-form supremum of :func:`pointwise_gradient_ratio` over all displacements.

    With ``Q(y) = y.A y`` and gradient ``|g.y|``, the sup of
    ``|g.y| exp(-3Q/4)`` is ``sqrt(g.A^-1 g) * sqrt(2/3) * exp(-1/2)``.
    """
    kc = coefficients_at(p, t)
    a, b = kc.growth, kc.back_shear
    g = np.array([kc.mu_t * a - 2.0 * kc.nu_t * b, 2.0 * kc.lambda_t * a - kc.mu_t * b]) / kc.f_t
    A = np.array([[kc.nu_t, 0.5 * kc.mu_t], [0.5 * kc.mu_t, kc.lambda_t]]) / kc.f_t
    return float(math.sqrt(t) * math.sqrt(g @ np.linalg.solve(A, g))
                 * math.sqrt(2.0 / 3.0) * math.exp(-0.5))


def gradient_operator_norm(p, t, k_max=400.0, n=1601):
    """``sup ||d_v exp(tA) u|| / ||u||`` from the Fourier multiplier."""
    kc = coefficients_at(p, t)
    k = np.linspace(-k_max, k_max, n)[:, None]
    eta0 = np.linspace(-k_max, k_max, n)[None, :]
    q = kc.lambda_t * k * k - kc.mu_t * k * eta0 + kc.nu_t * eta0 * eta0
    eta = (eta0 - kc.vartheta_t * k) * math.exp(p.beta * t)
    # L2 norm in (x, eta) of the output relative to input at (k, eta0)
    jac = math.exp(p.beta * t / 2)
    return float(np.max(np.abs(eta) * np.exp(-q)) * jac)


def _loglog_slope(t, y):
    slope, intercept = np.polyfit(np.log(t), np.log(y), 1)
    return float(slope), float(intercept)


@dataclass
class GradientBoundReport:
    t: np.ndarray
    ratio_sup: np.ndarray
    b_estimate: float
    slope: float
    operator_norms: np.ndarray
    largest_t_within_b: float


def gradient_bound_check(p, t_grid, b=None):
    require_admissible(p)
    t_grid = np.asarray(t_grid, dtype=float)
    ratios = np.array([pointwise_gradient_ratio(p, t) for t in t_grid])
    norms = np.array([gradient_operator_norm(p, t) for t in t_grid])
    slope, _ = _loglog_slope(t_grid, norms)
    b_est = float(np.max(ratios))
    bound = b_est if b is None else b
    within = t_grid[ratios <= bound * (1 + 1e-12)]
    return GradientBoundReport(t_grid, ratios, b_est, slope, norms,
                               float(within.max()) if within.size else float("nan"))


def state_gradient_norms(w0, p, t_grid):
    """``||d_v exp(tA) w0||_2`` for each t, via the grid propagator."""
    from .phase_state import d_dv
    out = []
    for t in t_grid:
        wt = propagate_linear(w0, p, t, check_resolution=False)
        g = d_dv(wt)
        out.append(float(np.sqrt(np.sum(g * g) * w0.grid.hx * w0.grid.hv)))
    return np.array(out)
