"""Phase-space grid, Wigner state storage, velocity transforms and norms.

The grid is a periodic box ``[-Lx, Lx) x [-Lv, Lv)`` sampled at
``x_j = -Lx + j*hx`` and ``v_l = -Lv + l*hv``.  Dual frequencies are stored
in ascending order, ``k_m = pi*m/Lx`` and ``eta_m = pi*m/Lv`` with
``m = -N/2 .. N/2-1``.

The velocity transform is the unitary one,

    w_hat(x, eta) = (2 pi)**-0.5 * sum_l w(x, v_l) exp(-i eta v_l) hv,

so that ``sum |w_hat|**2 dx deta == sum |w|**2 dx dv`` holds exactly.
"""

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SNAPSHOT_MAGIC = b"WPFPSNAP"
_HEADER = struct.Struct("<8s6d")


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PhaseGrid:
    dim: int
    Nx: int
    Nv: int
    Lx: float
    Lv: float

    def __post_init__(self):
        if self.dim != 1:
            raise ValueError("phase-space grids are one-dimensional in x and v (dim=1)")
        for name in ("Nx", "Nv"):
            n = getattr(self, name)
            if int(n) != n or not _is_pow2(int(n)) or n < 16:
                raise ValueError(f"{name} must be a power of two >= 16, got {n!r}")
            object.__setattr__(self, name, int(n))
        for name in ("Lx", "Lv"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def hx(self):
        return 2.0 * self.Lx / self.Nx

    @property
    def hv(self):
        return 2.0 * self.Lv / self.Nv

    @property
    def shape(self):
        return (self.Nx, self.Nv)

    @property
    def x(self):
        return -self.Lx + self.hx * np.arange(self.Nx)

    @property
    def v(self):
        return -self.Lv + self.hv * np.arange(self.Nv)

    @property
    def k(self):
        return np.pi / self.Lx * np.arange(-self.Nx // 2, self.Nx // 2)

    @property
    def eta(self):
        return np.pi / self.Lv * np.arange(-self.Nv // 2, self.Nv // 2)

    @property
    def deta(self):
        return np.pi / self.Lv

    def mesh(self):
        return np.meshgrid(self.x, self.v, indexing="ij")


@dataclass
class WignerState:
    grid: PhaseGrid
    values: np.ndarray
    time: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            raise TypeError("Wigner states are real-valued")
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        self.values = values
        self.time = float(self.time)

    def copy(self, values=None, time=None):
        return WignerState(self.grid,
                           self.values.copy() if values is None else values,
                           self.time if time is None else time)


# ---------------------------------------------------------------- transforms

def _eta_phase(grid):
    # exp(-i eta_m v_0) with v_0 = -Lv is (-1)**m
    m = np.arange(-grid.Nv // 2, grid.Nv // 2)
    return np.where(m % 2 == 0, 1.0, -1.0)


def fourier_v(w):
    """Unitary transform in v; returns complex array over (x, eta)."""
    grid, values = _unpack(w)
    spec = np.fft.fftshift(np.fft.fft(values, axis=1), axes=1)
    return spec * (_eta_phase(grid) * grid.hv / np.sqrt(2.0 * np.pi))


def inverse_fourier_v(w_hat, grid, time=0.0, return_complex=False):
    spec = np.asarray(w_hat) * (_eta_phase(grid) * np.sqrt(2.0 * np.pi) / grid.hv)
    values = np.fft.ifft(np.fft.ifftshift(spec, axes=1), axis=1)
    if return_complex:
        return values
    return WignerState(grid, values.real.copy(), time)


def apply_v_multiplier(grid, values, symbol):
    """Apply a Fourier multiplier in v; ``symbol`` broadcasts over (x, eta).

    Returns the complex result so that callers can inspect the residue.
    """
    spec = np.fft.fftshift(np.fft.fft(values, axis=1), axes=1)
    spec = spec * symbol
    return np.fft.ifft(np.fft.ifftshift(spec, axes=1), axis=1)


def apply_x_multiplier(grid, values, symbol):
    spec = np.fft.fftshift(np.fft.fft(values, axis=0), axes=0)
    spec = spec * symbol
    return np.fft.ifft(np.fft.ifftshift(spec, axes=0), axis=0)


def odd_symbol(grid_freqs):
    """``i*freq`` with the unpaired Nyquist entry removed."""
    sym = 1j * np.asarray(grid_freqs, dtype=float)
    sym[0] = 0.0
    return sym


def d_dv(w):
    grid, values = _unpack(w)
    sym = odd_symbol(grid.eta)[None, :]
    return apply_v_multiplier(grid, values, sym).real


def d_dx(w):
    grid, values = _unpack(w)
    sym = odd_symbol(grid.k)[:, None]
    return apply_x_multiplier(grid, values, sym).real


def shift_x(grid, values, shift):
    """Evaluate ``f(x - shift, .)`` spectrally; ``shift`` is a scalar or a v-array."""
    k = grid.k[:, None]
    shift = np.broadcast_to(np.asarray(shift, dtype=float).reshape(-1), (grid.Nv,))[None, :]
    phase = np.exp(-1j * k * shift)
    # Nyquist mode: keep the real average so the result stays real
    phase[0] = np.cos(k[0] * shift[0])
    return apply_x_multiplier(grid, values, phase).real


# ---------------------------------------------------------------- moments

def density(w):
    """Velocity integral, trapezoidal rule on the periodic v-grid."""
    grid, values = _unpack(w)
    return values.sum(axis=1) * grid.hv


def _unpack(w):
    if isinstance(w, WignerState):
        return w.grid, w.values
    raise TypeError("expected a WignerState")


def _l2(values, weight, grid):
    return float(np.sqrt(np.sum(weight * values * values) * grid.hx * grid.hv))


def norm_L2(w):
    grid, values = _unpack(w)
    return _l2(values, 1.0, grid)


def norm_X(w):
    grid, values = _unpack(w)
    weight = (1.0 + grid.v ** 2) ** 2
    return _l2(values, weight[None, :], grid)


def norm_X_tilde(w):
    grid, values = _unpack(w)
    weight = 1.0 + grid.v ** 4
    return _l2(values, weight[None, :], grid)


def norm_weighted(w, k):
    """``|| |v|**k w ||_2``."""
    grid, values = _unpack(w)
    weight = np.abs(grid.v) ** (2 * k)
    return _l2(values, weight[None, :], grid)


NORM_EQUIVALENCE = 2.0


def density_constant(grid):
    """Discrete ``|| (1 + v**2)**-1 ||_{L2_v}``; bounds ||n||_2 by ||w||_X."""
    return float(np.sqrt(np.sum((1.0 + grid.v ** 2) ** -2) * grid.hv))


def inner(a, b):
    ga, va = _unpack(a)
    _, vb = _unpack(b)
    return float(np.sum(va * vb) * ga.hx * ga.hv)


# ---------------------------------------------------------------- snapshots

def write_snapshot(w, path):
    grid = w.grid
    header = _HEADER.pack(SNAPSHOT_MAGIC, grid.dim, grid.Nx, grid.Nv, grid.Lx, grid.Lv, w.time)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(w.values, dtype="<f8").tobytes(order="C"))


def read_snapshot(path):
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot header")
    magic, dim, nx, nv, lx, lv, time = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: bad snapshot magic {magic!r}")
    grid = PhaseGrid(int(dim), int(nx), int(nv), lx, lv)
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size != grid.Nx * grid.Nv:
        raise ValueError(f"{path}: expected {grid.Nx * grid.Nv} values, found {body.size}")
    return WignerState(grid, body.reshape(grid.shape).astype(np.float64), time)


# ---------------------------------------------------------------- initial data

def gaussian_state(grid, x0=0.0, v0=0.0, sx=1.0, sv=1.0, mass=1.0, time=0.0):
    """Separable Gaussian with the given mass (periodized in x)."""
    x, v = grid.x, grid.v
    gx = np.zeros_like(x)
    period = 2.0 * grid.Lx
    for m in range(-3, 4):
        gx += np.exp(-0.5 * ((x - x0 + m * period) / sx) ** 2)
    gx /= np.sqrt(2.0 * np.pi) * sx
    gv = np.exp(-0.5 * ((v - v0) / sv) ** 2) / (np.sqrt(2.0 * np.pi) * sv)
    return WignerState(grid, mass * np.outer(gx, gv), time)


def indicator_state(grid, x_range, v_range, time=0.0):
    X, V = grid.mesh()
    inside = (X >= x_range[0]) & (X < x_range[1]) & (V >= v_range[0]) & (V < v_range[1])
    return WignerState(grid, inside.astype(float), time)


def random_state(grid, rng, bumps=3, time=0.0):
    """Signed sum of random Gaussian bumps; ``rng`` is a numpy Generator.

    Bumps sit well inside the box; at 128 points per axis or more they are
    resolved to round-off.
    """
    values = np.zeros(grid.shape)
    for _ in range(bumps):
        x0 = rng.uniform(-0.2, 0.2) * grid.Lx
        v0 = rng.uniform(-0.2, 0.2) * grid.Lv
        sx = rng.uniform(0.05, 0.08) * grid.Lx
        sv = rng.uniform(0.05, 0.08) * grid.Lv
        weight = rng.uniform(-1.0, 1.0)
        values += gaussian_state(grid, x0, v0, sx, sv, weight).values
    return WignerState(grid, values, time)


def seeded_rng(seed):
    """Counter-based generator used for every randomized case."""
    return np.random.Generator(np.random.Philox(int(seed)))
