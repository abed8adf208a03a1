"""Lattice dispersion, Matsubara grid and the free propagator.

Everything downstream works in rotated Brillouin-zone coordinates

    ``kplus = k1 + k2``,  ``kminus = k2 - k1``,

in which the band function is separable in half-angles and the Fermi
surface of the nearly half-filled band is axis-aligned.  Original lattice
coordinates appear only at I/O boundaries via :func:`rotate_momentum` /
:func:`unrotate_momentum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PoleError

# Band parameters: nearest-neighbour hopping is pinned to 1 and the chemical
# potential is parameterized by its offset mu0 from perfect nesting,
# mu = 2 - mu0.
HOPPING = 1.0

#: below this magnitude (both frequency and band energy) the free propagator
#: is treated as singular
POLE_TOL = 1e-14


@dataclass(frozen=True)
class ModelParams:
    """Model configuration: chemical-potential offset, temperature, scales.

    Parameters
    ----------
    mu0:
        Chemical-potential offset from half filling, ``mu = 2 - mu0``.
        Must lie in (0, 1).
    temperature:
        Temperature ``T > 0``; the inverse temperature is ``beta = 1/T``.
    gamma:
        Scale ratio of the multiscale decomposition, ``gamma >= 10``.
    lam:
        Bare on-site coupling.
    jmax_override:
        Optional explicit infrared cutoff index; by default ``jmax`` is the
        largest integer with ``gamma**(jmax-1) <= 1/(sqrt(2)*pi*T)``.
    """

    mu0: float = 1e-2
    temperature: float = 1e-2
    gamma: float = 10.0
    lam: float = 1e-2
    jmax_override: int | None = None
    j0: int = field(init=False)
    jmax: int = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.mu0 < 1.0:
            raise ConfigError(f"mu0 must be in (0, 1), got {self.mu0}")
        if self.temperature <= 0.0:
            raise ConfigError(f"temperature must be positive, got {self.temperature}")
        if self.gamma < 10.0:
            raise ConfigError(f"gamma must be >= 10, got {self.gamma}")
        object.__setattr__(self, "j0", int(math.floor(abs(math.log(self.mu0) / math.log(self.gamma)) + 1e-9)))
        if self.jmax_override is not None:
            if self.jmax_override < 0:
                raise ConfigError("jmax_override must be non-negative")
            object.__setattr__(self, "jmax", int(self.jmax_override))
        else:
            # largest j with gamma**(j-1) <= 1/(sqrt(2) pi T)
            tilde = math.log(1.0 / (math.sqrt(2.0) * math.pi * self.temperature)) / math.log(self.gamma)
            object.__setattr__(self, "jmax", int(math.floor(tilde + 1e-9)) + 1)

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature

    @property
    def mu(self) -> float:
        return 2.0 - self.mu0


@dataclass(frozen=True)
class Momentum:
    """Frequency-momentum triple ``(k0, kplus, kminus)`` in rotated coordinates."""

    k0: float
    kplus: float
    kminus: float

    @classmethod
    def from_original(cls, k0: float, k1: float, k2: float) -> "Momentum":
        kp, km = rotate_momentum(k1, k2)
        return cls(k0, kp, km)

    def to_original(self) -> tuple[float, float, float]:
        k1, k2 = unrotate_momentum(self.kplus, self.kminus)
        return (self.k0, k1, k2)

    def spatial(self) -> np.ndarray:
        return np.array([self.kplus, self.kminus])


def rotate_momentum(k1, k2):
    """Original zone coordinates -> rotated ``(kplus, kminus)``."""
    return k1 + k2, k2 - k1


def unrotate_momentum(kplus, kminus):
    """Rotated coordinates -> original zone coordinates ``(k1, k2)``."""
    return (kplus - kminus) / 2.0, (kplus + kminus) / 2.0


def in_rotated_zone(kplus, kminus, tol=1e-12):
    """True where ``(kplus, kminus)`` maps back into the original zone (-pi, pi]^2."""
    k1, k2 = unrotate_momentum(np.asarray(kplus), np.asarray(kminus))
    return (np.abs(k1) <= np.pi + tol) & (np.abs(k2) <= np.pi + tol)


def band_energy(kplus, kminus, params: ModelParams):
    """Band energy in rotated coordinates.

    Equals ``2 - cos k1 - cos k2 - mu`` of the original coordinates exactly,
    i.e. ``mu0 - 2 cos(kplus/2) cos(kminus/2)``.  Vectorized over numpy
    inputs; the zero level set is the non-interacting Fermi surface.
    """
    kp = np.asarray(kplus, dtype=float)
    km = np.asarray(kminus, dtype=float)
    out = params.mu0 - 2.0 * np.cos(kp / 2.0) * np.cos(km / 2.0)
    if out.ndim == 0:
        return float(out)
    return out


def band_energy_original(k1, k2, params: ModelParams):
    """Band energy ``2 - cos k1 - cos k2 - mu`` in original coordinates."""
    out = 2.0 - np.cos(np.asarray(k1, dtype=float)) - np.cos(np.asarray(k2, dtype=float)) - params.mu
    if np.ndim(out) == 0:
        return float(out)
    return out


def band_gradient(kplus, kminus):
    """Gradient of the band energy w.r.t. ``(kplus, kminus)``.

    Components ``(sin(kplus/2) cos(kminus/2), cos(kplus/2) sin(kminus/2))``;
    independent of mu0, pointing outward from the Fermi surface.
    """
    kp = np.asarray(kplus, dtype=float)
    km = np.asarray(kminus, dtype=float)
    gp = np.sin(kp / 2.0) * np.cos(km / 2.0)
    gm = np.cos(kp / 2.0) * np.sin(km / 2.0)
    return gp, gm


def matsubara_frequencies(params: ModelParams, n_cut: int) -> np.ndarray:
    """Fermionic Matsubara frequencies ``2*pi*T*(n + 1/2)`` for ``-n_cut <= n < n_cut``.

    Sorted ascending; symmetric under negation and never contains 0.
    """
    if n_cut < 1:
        raise ConfigError(f"n_cut must be >= 1, got {n_cut}")
    n = np.arange(-n_cut, n_cut)
    return 2.0 * np.pi * params.temperature * (n + 0.5)


def free_propagator(k: Momentum, params: ModelParams) -> complex:
    """Free propagator ``1 / (i*k0 - e0(k))`` at a single momentum.

    Raises :class:`PoleError` when both the frequency and the band energy are
    below ``POLE_TOL`` in magnitude.
    """
    e0 = band_energy(k.kplus, k.kminus, params)
    if abs(k.k0) < POLE_TOL and abs(e0) < POLE_TOL:
        raise PoleError(f"propagator pole at k0={k.k0}, e0={e0}")
    return 1.0 / complex(-e0, k.k0)


def free_propagator_grid(k0, kplus, kminus, params: ModelParams):
    """Vectorized free propagator; no pole check (caller controls supports)."""
    e0 = band_energy(kplus, kminus, params)
    return 1.0 / (1j * np.asarray(k0) - e0)
