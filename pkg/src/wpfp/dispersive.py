"""Dispersive decay of the free-streamed density and of the split field, in three dimensions.

Initial data are separable isotropic Gaussians ``w0 = M g_sx(x) g_sv(v)``.
Free streaming with friction, ``n0(x, t) = int w0(x - theta(t) v, v) dv``,
is then a Gaussian of variance ``sx^2 + theta^2 sv^2`` per axis, and the
smoothed free field ``E0`` is the field of a Gaussian charge whose variance
is further increased by ``R(t)``.  All norms are radial quadratures.

The nonlinear field component ``E1`` is handled through its norm majorant:
the scalar Volterra inequality

    m(t) = c int_0^t theta(s)^(-1/2) |w(t-s)| (A theta(t-s)^(-omega) + m(t-s)) ds

is solved by successive approximation with product integration on a node
grid, writing ``m(t) = t^(1/2 - omega) phi(t)`` with ``phi`` piecewise linear.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, RegimeWarning
from .kernel import phi as phi_fn
from .params import require_admissible

FOUR_PI = 4.0 * math.pi


# ---------------------------------------------------------------- Gaussians

@dataclass(frozen=True)
class GaussianData:
    sx: float
    sv: float
    mass: float = 1.0

    def l1x_l65v(self):
        """``|| |w0|_{L^{6/5}_v} ||_{L^1_x}``."""
        return abs(self.mass) * gaussian_lq_norm(1.0, self.sv ** 2, 1.2)

    def l2(self):
        return abs(self.mass) * (FOUR_PI * self.sx ** 2) ** -0.75 * (FOUR_PI * self.sv ** 2) ** -0.75


def gaussian_lq_norm(mass, var, q):
    """Closed-form ``L^q(R^3)`` norm of a Gaussian with the given mass and per-axis variance."""
    if np.isinf(q):
        return abs(mass) * (2 * math.pi * var) ** -1.5
    return abs(mass) * (2 * math.pi * var) ** (-1.5 + 1.5 / q) * q ** (-1.5 / q)


def _radial_lp(profile, p, width, tail=None):
    """``(4 pi int |f|^p r^2 dr)^(1/p)`` on ``[0, 40 width]`` plus an analytic tail."""
    val, _ = integrate.quad(lambda r: abs(profile(r)) ** p * r * r, 0.0, 40.0 * width,
                            limit=400, epsabs=0.0, epsrel=1e-10)
    total = FOUR_PI * val + (tail(40.0 * width) if tail else 0.0)
    return total ** (1.0 / p)


def gaussian_radial_lq(mass, var, q):
    """Radial-quadrature counterpart of :func:`gaussian_lq_norm`."""
    norm = mass * (2 * math.pi * var) ** -1.5
    return _radial_lp(lambda r: norm * math.exp(-0.5 * r * r / var), q, math.sqrt(var))


def enclosed_charge(r, mass, width):
    z = r / (math.sqrt(2.0) * width)
    return mass * (special.erf(z) - math.sqrt(2 / math.pi) * (r / width) * np.exp(-z * z))


def gaussian_field_norm(mass, width, p):
    """``|| grad V ||_p`` for ``-Lap V`` equal to a Gaussian charge of per-axis std ``width``."""
    if p <= 1.5:
        raise DomainError("the field of a charge is in L^p only for p > 3/2")
    if np.isinf(p):
        r = np.linspace(1e-6, 6, 6001) * width
        return float(np.max(enclosed_charge(r, mass, width) / (FOUR_PI * r * r)))

    def field_r(r):
        return enclosed_charge(r, mass, width) / (FOUR_PI * r * r) if r > 0 else 0.0

    def tail(rc):
        return FOUR_PI * (abs(mass) / FOUR_PI) ** p * rc ** (3 - 2 * p) / (2 * p - 3)

    return _radial_lp(field_r, p, width, tail)


def gaussian_field_l2(mass, width):
    """Closed form ``|E|_2 = M / (2 pi^(3/4) sqrt(width))``."""
    return abs(mass) / (2 * math.pi ** 0.75 * math.sqrt(width))


def gaussian_potential_norm(mass, width, p):
    """``|| V ||_p`` with ``V(r) = M erf(r / (sqrt 2 width)) / (4 pi r)``; needs p > 3."""
    if np.isinf(p):
        return abs(mass) / FOUR_PI * math.sqrt(2 / math.pi) / width
    if p <= 3:
        raise DomainError("the Newton potential of a charge is in L^p only for p > 3")

    def pot(r):
        if r == 0:
            return mass / FOUR_PI * math.sqrt(2 / math.pi) / width
        return mass * special.erf(r / (math.sqrt(2) * width)) / (FOUR_PI * r)

    def tail(rc):
        return FOUR_PI * (abs(mass) / FOUR_PI) ** p * rc ** (3 - p) / (p - 3)

    return _radial_lp(pot, p, width, tail)


# ---------------------------------------------------------------- free streaming

@dataclass(frozen=True)
class FreeStreamData:
    """Free-streamed Gaussian data; ``wp=True`` drops friction and smoothing."""

    data: GaussianData
    params: object
    omega: float = 0.5
    wp: bool = False

    def __post_init__(self):
        if not 0 <= self.omega < 1:
            raise DomainError("omega must lie in [0, 1)")
        if not self.wp:
            require_admissible(self.params)

    def vartheta(self, t):
        t = np.asarray(t, dtype=float)
        if self.wp:
            return t
        return t * phi_fn(1, -self.params.beta * t)

    def R(self, t):
        t = np.asarray(t, dtype=float)
        if self.wp:
            return np.zeros_like(t)
        p = self.params
        z = p.beta * t
        return (2 * p.alpha * t + p.sigma * t ** 3 * (8 * phi_fn(3, -2 * z) - 4 * phi_fn(3, -z))
                + 4 * p.gamma * t * t * phi_fn(2, -z))

    def n0_variance(self, t):
        return self.data.sx ** 2 + self.vartheta(t) ** 2 * self.data.sv ** 2

    def smoothed_variance(self, t):
        return self.n0_variance(t) + self.R(t)

    def n0_norm(self, t, q=1.2):
        return gaussian_radial_lq(self.data.mass, float(self.n0_variance(t)), q)

    def n0_norm_closed(self, t, q=1.2):
        return gaussian_lq_norm(self.data.mass, self.n0_variance(t), q)

    def E0_theta_norm(self, t, p=2.0):
        return gaussian_field_norm(self.data.mass, math.sqrt(float(self.n0_variance(t))), p)

    def E0_norm(self, t, p=2.0):
        return gaussian_field_norm(self.data.mass, math.sqrt(float(self.smoothed_variance(t))), p)

    def V0_norm(self, t, p=6.0):
        return gaussian_potential_norm(self.data.mass, math.sqrt(float(self.smoothed_variance(t))), p)

    def forcing_constant(self, T, samples=400):
        """``sup_{0 < t <= T} theta(t)^omega |n0(t)|_{6/5}`` on a log grid."""
        t = np.geomspace(T * 1e-8, T, samples)
        vals = self.vartheta(t) ** self.omega * self.n0_norm_closed(t)
        return float(np.max(vals))


# ---------------------------------------------------------------- fits

@dataclass
class ExponentFit:
    """Least-squares slope of ``log y`` against ``log t``.

    A fit is accepted when ``R^2 >= 0.99``.  For an almost flat series
    ``R^2`` carries no information, so a residual RMS below ``flat_rms`` is
    accepted instead.
    """

    name: str
    slope: float
    intercept: float
    r2: float
    rms: float
    target: float = None
    tol: float = 0.1
    sharp: bool = True
    flat_rms: float = 1e-2

    @property
    def good_fit(self):
        return self.r2 >= 0.99 or self.rms <= self.flat_rms

    @property
    def passed(self):
        if not self.good_fit:
            return False
        if self.target is None:
            return True
        if self.sharp:
            return abs(self.slope - self.target) <= self.tol
        return self.slope <= self.target + self.tol


def fit_exponent(t, y, name="", target=None, tol=0.1, sharp=True):
    lt, ly = np.log(np.asarray(t, float)), np.log(np.asarray(y, float))
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = ly - (slope * lt + intercept)
    ss = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss if ss > 0 else 1.0
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return ExponentFit(name, float(slope), float(intercept), r2, rms, target, tol, sharp)


# ---------------------------------------------------------------- Strichartz

@dataclass
class StrichartzReport:
    t: np.ndarray
    norms: np.ndarray
    bound_t: np.ndarray
    bound_vartheta: np.ndarray
    fit: ExponentFit
    majorized: bool
    majorized_vartheta: bool
    in_regime: bool


def strichartz_check(fs, t_grid, regime_factor=3.0, tol=0.05):
    """Decay of ``|n0(t)|_{6/5}`` against ``t^(-1/2) |w0|_{L^1_x L^{6/5}_v}``."""
    t = np.asarray(t_grid, dtype=float)
    theta = fs.vartheta(t)
    in_regime = bool(np.all(theta * fs.data.sv >= regime_factor * fs.data.sx))
    if not in_regime:
        warnings.warn("sample times are outside the dispersive regime theta(t) sv >> sx",
                      RegimeWarning, stacklevel=2)
    norms = np.array([fs.n0_norm(tt) for tt in t])
    ref = fs.data.l1x_l65v()
    bound_t = t ** -0.5 * ref
    bound_theta = theta ** -0.5 * ref
    fit = fit_exponent(t, norms, "strichartz", target=-0.5, tol=tol, sharp=False)
    return StrichartzReport(t, norms, bound_t, bound_theta, fit,
                            bool(np.all(norms <= bound_t * (1 + 1e-12))),
                            bool(np.all(norms <= bound_theta * (1 + 1e-12))), in_regime)


# ---------------------------------------------------------------- Volterra majorant

@dataclass
class E1NormSeries:
    t: np.ndarray
    majorant: np.ndarray
    phi: np.ndarray
    omega: float
    forcing: float
    coupling: float
    increments: list = field(default_factory=list)
    increment_bounds: list = field(default_factory=list)
    iterations: int = 0

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return t ** (0.5 - self.omega) * np.interp(t, self.t, self.phi)

    def phi_at(self, t):
        return np.interp(t, self.t, self.phi)

    @property
    def increment_ratios(self):
        """Increment over its a-priori bound, iteration by iteration."""
        return np.array([inc / b if b > 0 else 0.0
                         for inc, b in zip(self.increments, self.increment_bounds)])


def _as_norm_fn(w_norms):
    if callable(w_norms):
        return w_norms
    value = float(w_norms)
    return lambda t: value


def _alg_quad(fn, a, b, alpha, beta):
    """``int_a^b (x-a)^alpha (b-x)^beta fn(x) dx`` with exact endpoint weights."""
    if b <= a:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if alpha == 0 and beta == 0:
            val, _ = integrate.quad(fn, a, b, limit=200, epsabs=0, epsrel=1e-10)
        else:
            val, _ = integrate.quad(fn, a, b, weight="alg", wvar=(alpha, beta),
                                    limit=200, epsabs=0, epsrel=1e-10)
    return val


def _volterra_nodes(T, n):
    return np.concatenate([[0.0], np.geomspace(T * 1e-4, T, n)])


def volterra_E1(w_norms, fs, T, coupling=1.0, nodes=48, tol=1e-10, max_iter=200):
    """Norm majorant of the nonlinear field component on ``(0, T]``."""
    omega = fs.omega
    a = 0.5 - omega
    wn = _as_norm_fn(w_norms)
    A = fs.forcing_constant(T)
    t = _volterra_nodes(T, nodes)
    n = t.size

    def ratio(s):
        return math.sqrt(s / float(fs.vartheta(s))) if s > 0 else 1.0

    # forcing F_i = A int_0^{t_i} theta(s)^-1/2 |w(t_i-s)| theta(t_i-s)^-omega ds
    F = np.zeros(n)
    for i in range(1, n):
        ti = t[i]

        def integrand(tau, ti=ti):
            s = ti - tau
            th = float(fs.vartheta(tau))
            return ratio(s) * wn(tau) * ((tau / th) ** omega if tau > 0 else 1.0)

        F[i] = A * _alg_quad(integrand, 0.0, ti, -omega, -0.5)
    # product-integration matrix on the hat basis of phi
    K = np.zeros((n, n))
    for i in range(1, n):
        ti = t[i]
        for j in range(n):
            lo = t[j - 1] if j > 0 else t[0]
            hi = t[j + 1] if j + 1 < n else t[j]
            for left, right in ((lo, t[j]), (t[j], hi)):
                left, right = max(left, 0.0), min(right, ti)
                if right <= left:
                    continue

                def hat(tau, j=j):
                    if tau <= t[j]:
                        return (tau - t[j - 1]) / (t[j] - t[j - 1]) if j > 0 else 1.0
                    return (t[j + 1] - tau) / (t[j + 1] - t[j])

                at_zero = left == 0.0
                at_top = right == ti
                alpha = a if at_zero else 0.0
                beta = -0.5 if at_top else 0.0

                def fn(tau, ti=ti, at_zero=at_zero, at_top=at_top, hat=hat):
                    s = ti - tau
                    val = ratio(s) * wn(tau) * hat(tau)
                    if not at_zero:
                        val *= tau ** a
                    if not at_top:
                        val *= s ** -0.5
                    return val

                K[i, j] += _alg_quad(fn, left, right, alpha, beta)
    phi0 = coupling * wn(0.0) * A * special.beta(0.5, 1 - omega)
    weights = np.where(t > 0, t, 1.0) ** a
    phi = np.zeros(n)
    m = np.zeros(n)
    increments, bounds = [], []
    wmax = max(abs(wn(tt)) for tt in t)
    c_prime = coupling * wmax * math.sqrt(T / float(fs.vartheta(T)))
    D = None
    it = 0
    for it in range(1, max_iter + 1):
        m_new = coupling * (F + K @ phi)
        phi_new = np.where(t > 0, m_new / weights, phi0)
        delta = np.max(np.abs(phi_new[1:] - phi[1:]))
        increments.append(float(delta))
        if D is None:
            D = float(delta)
        bounds.append(D * c_prime ** (it - 1) * math.pi ** ((it - 1) / 2)
                      * special.gamma(1.5 - omega) / special.gamma(it / 2 + 1 - omega)
                      * T ** ((it - 1) / 2))
        m, phi = m_new, phi_new
        scale = np.max(np.abs(phi[1:]))
        if delta <= tol * max(scale, 1e-300):
            break
    else:
        raise RuntimeError("Volterra successive approximation did not converge")
    return E1NormSeries(t, m, phi, omega, A, coupling, increments, bounds, it)


def e1_lp_majorant(series, fs, w_norms, t, p, coupling=None):
    """``L^p`` majorant of ``E1`` built from its ``L^2`` majorant."""
    if not 2 <= p < 6:
        raise DomainError("the E1 L^p estimate needs 2 <= p < 6")
    if fs.wp and p != 2:
        raise DomainError("without Fokker-Planck smoothing only the L^2 estimate is available")
    coupling = series.coupling if coupling is None else coupling
    omega = fs.omega
    expo = 1.5 / p - 0.75
    alpha = expo - 0.5
    wn = _as_norm_fn(w_norms)
    A = series.forcing

    def smooth(s):
        # (R(s)/s)^expo (s/theta(s))^(1/2), equal to (2 alpha)^expo at s = 0
        if s == 0:
            return (2 * fs.params.alpha) ** expo if expo != 0 else 1.0
        return (float(fs.R(s)) / s) ** expo * math.sqrt(s / float(fs.vartheta(s)))

    out = []
    for ti in np.atleast_1d(t):
        def forced(s, ti=ti):
            tau = ti - s
            th = float(fs.vartheta(tau))
            return smooth(s) * wn(tau) * ((tau / th) ** omega if tau > 0 else 1.0)

        def fed(s, ti=ti):
            tau = ti - s
            return smooth(s) * wn(tau) * series.phi_at(tau)

        v1 = _alg_quad(forced, 0.0, ti, alpha, -omega)
        v2 = _alg_quad(fed, 0.0, ti, alpha, 0.5 - omega)
        out.append(coupling * (A * v1 + v2))
    return np.array(out)


# ---------------------------------------------------------------- suite

def smoothing_kernel(x, R):
    """``R^{-3/2} N(x / sqrt R)`` with ``N`` the standard Gaussian in three dimensions."""
    r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)
    return (2 * math.pi * R) ** -1.5 * np.exp(-0.5 * r2 / R)


@dataclass
class FieldSplit:
    """Sampled norms of the split field and potential with their exponent fits."""

    t: np.ndarray
    fits: list
    values: dict

    def fit(self, name):
        return next(f for f in self.fits if f.name.split("_")[0] == name)

    @property
    def passed(self):
        return all(f.passed for f in self.fits)


def field_decay_suite(fs, T, p_exponent=2.0, potential_exponent=6.0, t_min=None,
                      samples=12, coupling=0.05, w_norms=1.0,
                      components=("E0", "E1", "V0", "V1"), series=None):
    """Fitted decay exponents of the split field and potential against their targets.

    Field norms are taken in ``L^p`` with ``p = p_exponent`` and potential
    norms in ``L^q`` with ``q = potential_exponent``.  The ``V1`` majorant is
    the ``E1`` majorant in ``L^r``, ``r = 3q/(q + 3)``.  Fits flagged as not
    sharp only require the measured decay to be at least as fast as the
    target.
    """
    p, q = float(p_exponent), float(potential_exponent)
    omega = fs.omega
    if "E0" in components and not 2 <= p <= 6:
        raise DomainError("E0 L^p decay needs 2 <= p <= 6")
    if "E1" in components and not 2 <= p < 6:
        raise DomainError("E1 L^p decay needs 2 <= p < 6")
    if ("V0" in components or "V1" in components) and not q >= 6:
        raise DomainError("potential decay needs q >= 6")
    t_min = T / 20 if t_min is None else t_min
    t = np.geomspace(t_min, T, samples)
    fits, values = [], {}
    if "E0" in components:
        e0 = np.array([fs.E0_norm(tt, p) for tt in t])
        values["E0"] = e0
        theta = 1.5 * (p - 2) / p
        fits.append(fit_exponent(t, e0, f"E0_L{p:g}", -omega * (1 - theta), sharp=(p == 2)))
    if series is None and ("E1" in components or "V1" in components):
        series = volterra_E1(w_norms, fs, T, coupling)
    if "E1" in components:
        e1 = series.at(t) if p == 2 else e1_lp_majorant(series, fs, w_norms, t, p)
        values["E1"] = e1
        fits.append(fit_exponent(t, e1, f"E1_L{p:g}", 1.5 / p - 0.25 - omega))
    if "V0" in components:
        v0 = np.array([fs.V0_norm(tt, q) for tt in t])
        values["V0"] = v0
        theta = 0.5 - 3 / q
        fits.append(fit_exponent(t, v0, f"V0_L{q:g}", -omega * (1 - theta), sharp=(q == 6)))
    if "V1" in components:
        r = 3.0 if np.isinf(q) else 3 * q / (q + 3)
        v1 = series.at(t) if r == 2 else e1_lp_majorant(series, fs, w_norms, t, r)
        values["V1"] = v1
        fits.append(fit_exponent(t, v1, f"V1_L{q:g}", 1.5 / q + 0.25 - omega))
    return FieldSplit(t, fits, values)


# ---------------------------------------------------------------- shifted Gamma

def _scaled_exp1(x):
    """``e^x E1(x)`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 600
    out[small] = np.exp(x[small]) * special.exp1(x[small])
    xb = x[~small]
    out[~small] = (1 - 1 / xb + 2 / xb ** 2 - 6 / xb ** 3 + 24 / xb ** 4) / xb
    return out


def shifted_gamma_norm(E_width, E_mass, sx, sv, s, tilt=1.0, k_nodes=256, z_nodes=1024):
    """``|| int (Gamma[E] u)(x - s v, v) dv ||_2`` for a Gaussian charge and separable u.

    ``E`` is the field of a Gaussian charge (std ``E_width``, mass ``E_mass``);
    ``u = g h`` with ``h`` the unit-mass Gaussian of std ``sv`` and
    ``g = (1 + tilt x_3 / sx) G`` for the unit-mass Gaussian ``G`` of std ``sx``.
    With ``tilt = 0`` the data are coaxial with the charge and ``int E g = 0``.

    In Fourier space, after the transverse integrals (closed forms through
    ``e^a E1(a)``) and the angular average, three one-dimensional integrals
    along ``k`` remain; they are done by Gauss-Legendre on both sides of the
    logarithmic point at zero.
    """
    if E_mass == 0:
        return 0.0
    width2 = E_width ** 2 + sx ** 2
    a = 0.5 * width2
    kmax = 10.0 / min(sx, E_width)
    if s > 0:
        kmax = min(kmax, 10.0 / (sv * s))
    xk, wk = np.polynomial.legendre.leggauss(k_nodes)
    kappa = 0.5 * kmax * (xk + 1)
    wkap = 0.5 * kmax * wk
    xz, wz = np.polynomial.legendre.leggauss(z_nodes)
    centre = sx ** 2 * kappa / width2
    reach = 12.0 / math.sqrt(width2)
    P = np.zeros_like(kappa)
    S = np.zeros_like(kappa)
    T = np.zeros_like(kappa)
    kk = kappa[:, None]
    for lo, hi in ((np.minimum(centre - reach, 0.0), np.zeros_like(centre)),
                   (np.zeros_like(centre), np.maximum(centre + reach, 0.0))):
        lo, hi = lo[:, None], hi[:, None]
        z = 0.5 * (hi - lo) * xz[None, :] + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * wz[None, :]
        G = (np.exp(-0.5 * E_width ** 2 * z * z - 0.5 * sx ** 2 * (kk - z) ** 2)
             * np.sinc(s * z * kk / (2 * math.pi)))
        # an interval collapsed onto z = 0 has zero weight; keep its nodes finite
        e1 = _scaled_exp1(np.where(z == 0, 1.0, a * z * z))
        i0 = math.pi * e1
        i2 = math.pi * (1.0 / a - z * z * e1)
        P += np.sum(w * G * z * i0, axis=1)
        S += np.sum(w * G * z * (kk - z) * i0, axis=1)
        T += np.sum(w * G * 0.5 * i2, axis=1)
    amp = E_mass / (2 * math.pi) ** 3 * np.exp(-0.5 * (sv * s * kappa) ** 2)
    c = tilt * sx
    q2 = amp ** 2 * (P ** 2 + c * c * (S ** 2 + 2 * T ** 2) / 3.0)
    total = 4 * math.pi * np.sum(wkap * q2 * kappa ** 2) / (2 * math.pi) ** 3
    return math.sqrt(total)


def tilted_gaussian_l2(sx, sv, tilt=1.0):
    """``|u|_2`` for the data of :func:`shifted_gamma_norm`."""
    return GaussianData(sx, sv, 1.0).l2() * math.sqrt(1.0 + 0.5 * tilt * tilt)


def shifted_gamma_estimate(E_width, E_mass, sx, sv, s, tilt=1.0, **nodes):
    """``s^{3/2} |int (Gamma[E] u)(x - s v, v) dv|_2 / (|E|_2 |u|_2)``."""
    num = shifted_gamma_norm(E_width, E_mass, sx, sv, s, tilt, **nodes)
    if num == 0.0:
        return 0.0
    return s ** 1.5 * num / (gaussian_field_l2(E_mass, E_width) * tilted_gaussian_l2(sx, sv, tilt))


def shifted_gamma_transform_1d(E, g, h_hat, k, s, y, r_nodes=64):
    """One-dimensional Fourier representation of the shifted velocity average.

    Returns ``Q_hat(k) = sqrt(2 pi) h_hat(s k) int_{-1/2}^{1/2} dr int E(y - r s k) g(y) e^{-i k y} dy``
    by Gauss-Legendre in r and the trapezoidal rule on the sample points ``y``.
    """
    xs, ws = np.polynomial.legendre.leggauss(r_nodes)
    r, wr = 0.5 * xs, 0.5 * ws
    dy = y[1] - y[0]
    out = np.empty(len(k), dtype=complex)
    for idx, kk in enumerate(k):
        inner = 0.0 + 0.0j
        for ri, wi in zip(r, wr):
            inner += wi * np.sum(E(y - ri * s * kk) * g(y) * np.exp(-1j * kk * y)) * dy
        out[idx] = math.sqrt(2 * math.pi) * h_hat(s * kk) * inner
    return out
