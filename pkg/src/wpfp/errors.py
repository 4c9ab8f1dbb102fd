"""Exception and warning types shared across the package."""


class InvalidParameter(ValueError):
    """A physical coefficient is non-finite or outside its admissible range."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class NeutralityError(ValueError):
    """Periodic Poisson solve requested for a density with nonzero mean."""


class ConsistencyError(ArithmeticError):
    """A result that must be real carries a large imaginary residue."""


class NonContraction(RuntimeError):
    """Picard iteration did not converge within the allowed iterations.

    ``series`` optionally carries the diagnostics gathered before the failure.
    """

    def __init__(self, message, series=None):
        super().__init__(message)
        self.series = series


class ConfigError(ValueError):
    """Malformed or unknown entry in a run configuration."""


class ResolutionWarning(UserWarning):
    """The Gaussian kernel is narrower than the grid can represent."""


class RegimeWarning(UserWarning):
    """Sample times fall outside the asymptotic regime of an estimate."""
