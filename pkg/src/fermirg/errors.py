"""Exception types shared across the package."""


class FermirgError(Exception):
    """Base class for all package errors."""


class ConfigError(FermirgError):
    """Invalid model or run configuration."""


class PoleError(FermirgError):
    """Propagator evaluated too close to its pole."""


class AmbiguousProjection(FermirgError):
    """Fermi-surface projection has two equidistant candidates.

    Carries both candidate points as ``.candidates`` (list of (kplus, kminus)
    pairs) so callers can apply their own tie-break.
    """

    def __init__(self, message, candidates):
        super().__init__(message)
        self.candidates = candidates


class DegeneratePoint(FermirgError):
    """Geometric closed form evaluated at a degenerate point."""


class GridTooSmall(FermirgError):
    """Requested sample grid does not cover the required decay lengths."""


class QuadratureError(FermirgError):
    """Numerical integration failed its convergence check."""


class InsufficientSpan(FermirgError):
    """Regression input does not span enough distinct exponent values."""
