"""Physical coefficients of the quantum Fokker-Planck operator.

The linear operator is

    A w = -v . grad_x w + beta div_v(v w) + sigma Lap_v w
          + 2 gamma div_v(grad_x w) + alpha Lap_x w

and a parameter set is admissible for quantum evolution when

    alpha sigma >= gamma**2 + beta**2 / 16     (Lindblad)
    alpha sigma >  gamma**2                    (uniform ellipticity)
"""

import math
from dataclasses import dataclass, fields

from . import config
from .errors import ConfigError, InvalidParameter

LINDBLAD = "lindblad"
ELLIPTICITY = "ellipticity"


@dataclass(frozen=True)
class ParameterSet:
    alpha: float
    beta: float
    gamma: float
    sigma: float
    hbar: float = 1.0
    dim: int = 1

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "sigma", "hbar"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidParameter(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.alpha < 0:
            raise InvalidParameter(f"alpha must be >= 0, got {self.alpha}")
        if self.beta < 0:
            raise InvalidParameter(f"beta must be >= 0, got {self.beta}")
        if self.sigma <= 0:
            raise InvalidParameter(f"sigma must be > 0, got {self.sigma}")
        if self.hbar <= 0:
            raise InvalidParameter(f"hbar must be > 0, got {self.hbar}")
        if self.dim not in (1, 3):
            raise InvalidParameter(f"dim must be 1 or 3, got {self.dim!r}")

    @classmethod
    def from_mapping(cls, mapping):
        """Build from string values, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigError(f"unknown parameter keys: {', '.join(unknown)}")
        kwargs = {}
        for key, value in mapping.items():
            if key == "dim":
                kwargs[key] = config.to_int(key, value)
            else:
                kwargs[key] = config.to_float(key, value)
        missing = sorted({"alpha", "beta", "gamma", "sigma"} - set(kwargs))
        if missing:
            raise ConfigError(f"missing parameter keys: {', '.join(missing)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class ValidationResult:
    accepted: bool
    clauses: tuple = ()
    message: str = ""

    @property
    def clause(self):
        return self.clauses[0] if self.clauses else None

    def __bool__(self):
        return self.accepted


@dataclass(frozen=True)
class DerivedConstants:
    kappa: float
    mass_growth_rate: float


def lindblad_check(p):
    a_s = p.alpha * p.sigma
    failed = []
    notes = []
    rhs = p.gamma ** 2 + p.beta ** 2 / 16.0
    if a_s < rhs:
        failed.append(LINDBLAD)
        notes.append(f"Lindblad condition violated: alpha*sigma = {a_s:g} < "
                     f"gamma^2 + beta^2/16 = {rhs:g}")
    if not a_s > p.gamma ** 2:
        failed.append(ELLIPTICITY)
        notes.append(f"ellipticity condition violated: alpha*sigma = {a_s:g} is not > "
                     f"gamma^2 = {p.gamma ** 2:g}")
    if failed:
        return ValidationResult(False, tuple(failed), "; ".join(notes))
    return ValidationResult(True)


def require_admissible(p):
    result = lindblad_check(p)
    if not result:
        raise InvalidParameter(result.message)
    return p


def kappa(p):
    """Shift making ``A - kappa`` dissipative in the weighted norm.

    Per velocity direction the weight ``v_i**4`` contributes
    ``(d/2 - 2) beta`` and ``6 sigma v_i**2 <= 3 sigma (1 + v_i**4)``; the
    unweighted part contributes ``(d/2) beta``.  Collecting terms gives
    ``d beta / 2 + 3 d sigma``.
    """
    require_admissible(p)
    return 0.5 * p.dim * p.beta + 3.0 * p.dim * p.sigma


def derived_constants(p):
    return DerivedConstants(kappa=kappa(p), mass_growth_rate=p.dim * p.beta)


def read_parameter_file(path):
    return ParameterSet.from_mapping(config.read_file(path))
