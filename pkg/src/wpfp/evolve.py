"""Nonlinear time stepping by Picard iteration on the Duhamel formula.

One step of size ``h`` solves

    z = P(h) w + h P(h/2) N((w + z)/2),      N(u) = Theta[V[u]] u,

where ``P`` is the exact linear propagator and the Duhamel integral is
replaced by the midpoint rule.  When the iteration fails to contract the
step is split in two, recursively.
"""

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import NonContraction, ResolutionWarning
from .kernel import LinearPropagator, coefficients_at, resolution_ok
from .params import require_admissible
from .phase_state import (WignerState, apply_v_multiplier, apply_x_multiplier, density,
                          norm_L2, norm_weighted, norm_X, odd_symbol)
from .potential import solve_poisson
from .theta_ops import theta_apply

COLUMNS = ("time", "l2", "vw", "v2w", "X", "n_l2", "E_l2", "picard_iters")


@dataclass(frozen=True)
class EvolveConfig:
    dt: float
    t_end: float
    picard_tol: float = 1e-12
    picard_max: int = 25
    monitor_cadence: int = 1
    nonlinear: bool = True
    max_halvings: int = 8

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0 < self.picard_tol <= 1e-2:
            raise ValueError("picard_tol must lie in (0, 1e-2]")
        if self.picard_max < 1 or self.monitor_cadence < 1:
            raise ValueError("picard_max and monitor_cadence must be >= 1")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if abs(self.steps * self.dt - self.t_end) > 1e-9 * max(self.t_end, 1.0):
            raise ValueError("t_end must be an integer multiple of dt")

    @property
    def steps(self):
        return int(round(self.t_end / self.dt))


@dataclass
class DiagnosticsSeries:
    rows: list = field(default_factory=list)
    dissipation: list = field(default_factory=list)
    increments: list = field(default_factory=list)

    def append(self, row, dissipation):
        if self.rows and not row[0] > self.rows[-1][0]:
            raise ValueError("diagnostic timestamps must increase")
        self.rows.append(tuple(float(x) for x in row))
        self.dissipation.append(float(dissipation))

    def column(self, name):
        return np.array([r[COLUMNS.index(name)] for r in self.rows])

    def __len__(self):
        return len(self.rows)

    def write_csv(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            for row in self.rows:
                writer.writerow([repr(row[0])] + [repr(x) for x in row[1:-1]] + [int(row[-1])])


# ---------------------------------------------------------------- operators

def field_of(w):
    """Torus potential and field of the density of ``w`` (neutralized)."""
    return solve_poisson(density(w), Lx=w.grid.Lx, time=w.time)


def nonlinear_term(u):
    pot = field_of(u)
    return theta_apply(pot.V, u)


def dissipation(w, p):
    """``sigma |w_v|^2 + 2 gamma <w_v, w_x> + alpha |w_x|^2``."""
    grid = w.grid
    wv = apply_v_multiplier(grid, w.values, odd_symbol(grid.eta)[None, :]).real
    wx = apply_x_multiplier(grid, w.values, odd_symbol(grid.k)[:, None]).real
    cell = grid.hx * grid.hv
    return float((p.sigma * np.sum(wv * wv) + 2 * p.gamma * np.sum(wv * wx)
                  + p.alpha * np.sum(wx * wx)) * cell)


class _Propagators:
    def __init__(self, p, grid):
        self.p, self.grid, self._cache = p, grid, {}

    def __call__(self, t):
        if t not in self._cache:
            self._cache[t] = LinearPropagator(self.p, self.grid, t, check_resolution=False)
        return self._cache[t]


def check_step_resolution(p, grid, dt):
    kc = coefficients_at(p, dt)
    if not resolution_ok(kc, grid):
        warnings.warn(f"step dt={dt:g} under-resolves the kernel on this grid",
                      ResolutionWarning, stacklevel=3)
        return False
    return True


@dataclass
class StepResult:
    state: WignerState
    iterations: int
    increments: list


def duhamel_step(w, p, cfg, dt=None, propagators=None):
    """One Picard-solved midpoint Duhamel step; raises NonContraction."""
    dt = cfg.dt if dt is None else dt
    props = propagators or _Propagators(p, w.grid)
    linear = props(dt)(w)
    if not cfg.nonlinear:
        return StepResult(linear, 0, [])
    half = props(0.5 * dt)
    z = linear
    increments = []
    for it in range(1, cfg.picard_max + 1):
        mid = WignerState(w.grid, 0.5 * (w.values + z.values), w.time + 0.5 * dt)
        forced = half(nonlinear_term(mid))
        new = WignerState(w.grid, linear.values + dt * forced.values, w.time + dt)
        diff = norm_X(WignerState(w.grid, new.values - z.values))
        size = norm_X(new)
        inc = diff / size if size > 0 else diff
        increments.append(inc)
        z = new
        if inc < cfg.picard_tol:
            return StepResult(z, it, increments)
    raise NonContraction(f"Picard iteration did not reach {cfg.picard_tol:g} in "
                         f"{cfg.picard_max} iterations at dt={dt:g} "
                         f"(last increment {increments[-1]:.3e})")


def _advance(w, p, cfg, dt, props, depth):
    try:
        res = duhamel_step(w, p, cfg, dt, props)
        return res.state, res.iterations
    except NonContraction:
        if depth >= cfg.max_halvings:
            raise
    mid, n1 = _advance(w, p, cfg, 0.5 * dt, props, depth + 1)
    end, n2 = _advance(mid, p, cfg, 0.5 * dt, props, depth + 1)
    return end, n1 + n2


def sample(w, p, iterations):
    pot = field_of(w)
    n_l2 = math.sqrt(float(np.sum(pot.n ** 2)) * w.grid.hx)
    E_l2 = math.sqrt(float(np.sum(pot.E ** 2)) * w.grid.hx)
    row = (w.time, norm_L2(w), norm_weighted(w, 1), norm_weighted(w, 2), norm_X(w),
           n_l2, E_l2, iterations)
    return row, dissipation(w, p)


def run(w0, p, cfg, on_sample=None):
    """Evolve to ``cfg.t_end``; returns ``(state, DiagnosticsSeries)``.

    ``on_sample(state, step_index)`` is called at every monitored step.
    """
    require_admissible(p)
    check_step_resolution(p, w0.grid, cfg.dt)
    props = _Propagators(p, w0.grid)
    series = DiagnosticsSeries()
    steps = cfg.steps
    w = WignerState(w0.grid, w0.values, w0.time)
    series.append(*sample(w, p, 0))
    if on_sample:
        on_sample(w, 0)
    for n in range(1, steps + 1):
        try:
            w, iters = _advance(w, p, cfg, cfg.dt, props, 0)
        except NonContraction as exc:
            raise NonContraction(str(exc), series) from exc
        w = WignerState(w.grid, w.values, w0.time + n * cfg.dt)
        if n % cfg.monitor_cadence == 0 or n == steps:
            series.append(*sample(w, p, iters))
            if on_sample:
                on_sample(w, n)
    return w, series


# ---------------------------------------------------------------- monitors

@dataclass
class MonitorReport:
    bounded: bool
    ceiling_ratio: dict
    budget_ok: bool
    budget_margin: float
    budget: np.ndarray
    growth: np.ndarray


def weighted_monitors(series, p, ceiling=10.0, slack=1e-6):
    """Boundedness of the weighted norms and the ``|v w|^2`` growth budget.

    In dimension d the linear part satisfies
    ``d/dt |v w|^2 <= 2 (d sigma |w|^2 + (d - 2) beta/2 |v w|^2)``; the
    budget integrand is reported sample by sample.
    """
    if len(series) == 0:
        raise ValueError("empty series")
    t = series.column("time")
    l2, vw, v2w, X = (series.column(c) for c in ("l2", "vw", "v2w", "X"))
    ratios = {}
    bounded = True
    for name, col in (("vw", vw), ("v2w", v2w), ("X", X)):
        ref = col[0]
        ratio = float(np.max(col) / ref) if ref > 0 else (0.0 if np.all(col == 0) else math.inf)
        ratios[name] = ratio
        bounded &= ratio <= ceiling and bool(np.all(np.isfinite(col)))
    d = p.dim
    budget = 2.0 * (d * p.sigma * l2 ** 2 + (d - 2) * 0.5 * p.beta * vw ** 2)
    growth = np.diff(vw ** 2)
    allowed = 0.5 * (budget[1:] + budget[:-1]) * np.diff(t) + slack * np.diff(t)
    margin = float(np.min(allowed - growth)) if growth.size else 0.0
    return MonitorReport(bool(bounded), ratios, margin >= 0, margin, budget, growth)


def l2_law(series, p):
    """``max_t log(|w(t)| / |w0|) - d beta t / 2``; non-positive when the law holds."""
    t = series.column("time")
    l2 = series.column("l2")
    return float(np.max(np.log(l2 / l2[0]) - 0.5 * p.dim * p.beta * (t - t[0])))


def energy_closure(series, p):
    """Relative mismatch of ``|w(t)|^2 - |w0|^2 = int (d beta |w|^2 - 2 D) ds``.

    Simpson-integrated over the samples; requires an odd number of samples
    for full Simpson order.
    """
    t = series.column("time")
    l2sq = series.column("l2") ** 2
    rate = p.dim * p.beta * l2sq - 2.0 * np.array(series.dissipation)
    predicted = simpson(rate, x=t)
    actual = l2sq[-1] - l2sq[0]
    return float(abs(actual - predicted) / l2sq[0])


def step_halving_errors(w0, p, cfg, levels=3):
    """Errors at ``t_end`` of runs with ``dt, dt/2, ...`` against a run refined ``levels`` times.

    Returns the list of X-norm errors, coarsest first.
    """
    finals = []
    for level in range(levels + 1):
        dt = cfg.dt / 2 ** level
        sub = EvolveConfig(dt, cfg.t_end, cfg.picard_tol, cfg.picard_max,
                           monitor_cadence=max(1, 2 ** level * cfg.steps),
                           nonlinear=cfg.nonlinear, max_halvings=cfg.max_halvings)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            finals.append(run(w0, p, sub)[0].values)
    ref = finals[-1]
    return [norm_X(WignerState(w0.grid, f - ref)) for f in finals[:-1]]
