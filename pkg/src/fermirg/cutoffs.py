"""Compactly supported smooth cutoffs and the multiscale partition of unity.

The basic object is an even bump ``chi`` with

    chi(t) = 1        for |t| <= 1,
    chi(t) in (0, 1)  for 1 < |t| <= 2,
    chi(t) = 0        for |t| > 2,

built from the classic mollifier ``exp(-x**-a)``.  The transition sharpness
is controlled by a Gevrey index ``h > 1`` (``a = 1/(h-1)``); the Fourier
transform then decays like a stretched exponential ``exp(-c |k|**(1/h))``.

From ``chi`` two telescoping families are derived:

* shell cutoffs ``chi_j(t) = chi(gamma**(2j-2) t) - chi(gamma**(2j) t)``
  (with ``chi_0 = 1 - chi``), which slice ``t = k0**2 + e0**2`` into
  geometric shells, and
* sector windows ``v_s(r) = chi_{s+1}(r)`` for ``s < j`` with the innermost
  window ``v_j(r) = chi(gamma**(2j) r)``, which slice squared quasi-momentum
  components.  The windows sum exactly to ``chi(r)``.

All evaluators are pure and vectorized over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


def _mollifier(x, a):
    """``exp(-x**-a)`` for x > 0, extended smoothly by 0 for x <= 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0.0
    with np.errstate(over="ignore", divide="ignore"):
        out[pos] = np.exp(-np.power(x[pos], -a))
    return out


@dataclass(frozen=True)
class GevreyBump:
    """Even bump with plateau [-1, 1] and support (-2, 2).

    ``index_h`` sets the transition regularity class; ``amplitude`` and
    ``width`` record the plateau height (always 1 here) and the support
    half-width for reporting purposes.
    """

    index_h: float = 2.0
    amplitude: float = 1.0
    width: float = 2.0
    a: float = field(init=False)

    def __post_init__(self):
        if self.index_h <= 1.0:
            raise ConfigError(f"Gevrey index must satisfy h > 1, got {self.index_h}")
        object.__setattr__(self, "a", 1.0 / (self.index_h - 1.0))

    def __call__(self, t):
        """Evaluate the bump; accepts scalars or numpy arrays."""
        t = np.abs(np.asarray(t, dtype=float))
        u = t - 1.0  # transition coordinate, [1,2] -> [0,1]
        f_down = _mollifier(1.0 - u, self.a)
        f_up = _mollifier(u, self.a)
        with np.errstate(invalid="ignore"):
            val = np.where(t <= 1.0, 1.0, np.where(t >= 2.0, 0.0, f_down / (f_down + f_up)))
        if val.ndim == 0:
            return float(val)
        return val

    @property
    def alpha(self) -> float:
        """Stretch exponent ``1/h`` of the Fourier-transform decay."""
        return 1.0 / self.index_h


def make_bump(h: float = 2.0, gamma_g: float = 1.0) -> GevreyBump:
    """Construct the transition bump for Gevrey index ``h > 1``.

    ``gamma_g`` is kept as the conventional width parameter of the Gevrey
    derivative bounds; the support is fixed to the [1, 2] transition that the
    shell decomposition assumes.
    """
    if h <= 1.0:
        raise ConfigError(f"Gevrey index must satisfy h > 1, got {h}")
    return GevreyBump(index_h=h, width=2.0 * gamma_g)


def chi_j(t, j: int, bump: GevreyBump, gamma: float):
    """Shell cutoff at scale ``j``.

    ``chi_0 = 1 - chi`` catches everything outside the infrared region; for
    ``j >= 1`` the support is the shell ``gamma**(-2j-2) <= t <= 2*gamma**(-2j+2)``.
    """
    if j < 0:
        raise ConfigError(f"scale index must be >= 0, got {j}")
    t = np.asarray(t, dtype=float)
    if j == 0:
        out = np.asarray(1.0 - bump(t))
    else:
        out = np.asarray(bump(gamma ** (2 * j - 2) * t) - bump(gamma ** (2 * j) * t))
    if out.ndim == 0:
        return float(out)
    return out


def chi_le(t, j: int, bump: GevreyBump, gamma: float):
    """Partial sum ``sum_{i<=j} chi_i(t) = 1 - chi(gamma**(2j) t)``."""
    t = np.asarray(t, dtype=float)
    out = np.asarray(1.0 - bump(gamma ** (2 * j) * t))
    if out.ndim == 0:
        return float(out)
    return out


def sector_window(r, s: int, j: int, bump: GevreyBump, gamma: float):
    """Quasi-momentum window ``v_s`` at scale ``j``.

    ``v_s = chi_{s+1}`` for ``0 <= s <= j-1`` and ``v_j(r) = chi(gamma**(2j) r)``;
    the family telescopes to ``sum_{s=0}^{j} v_s(r) = chi(r)``.  Applied to
    ``r = q**2`` the window ``v_s`` with ``s < j`` localizes
    ``gamma**(-s-1) <= |q| <= sqrt(2) gamma**(-s)``.
    """
    if not 0 <= s <= j:
        raise ConfigError(f"sector window index s={s} outside [0, {j}]")
    if s == j:
        r = np.asarray(r, dtype=float)
        out = np.asarray(bump(gamma ** (2 * j) * r))
        if out.ndim == 0:
            return float(out)
        return out
    return chi_j(r, s + 1, bump, gamma)


@dataclass(frozen=True)
class PartitionSet:
    """Immutable bundle of the shell cutoffs and sector windows up to ``jmax``."""

    jmax: int
    gamma: float
    bump: GevreyBump = field(default_factory=GevreyBump)

    def chi(self, t):
        return self.bump(t)

    def shell(self, t, j: int):
        return chi_j(t, j, self.bump, self.gamma)

    def window(self, r, s: int, j: int):
        return sector_window(r, s, j, self.bump, self.gamma)

    def infrared_weight(self, t):
        """Total retained infrared weight ``sum_{j<=jmax} chi_j = 1 - chi(gamma**(2 jmax) t)``."""
        return chi_le(t, self.jmax, self.bump, self.gamma)


def fourier_decay_exponent(bump: GevreyBump, n: int = 1 << 15, half_width: float = 8.0,
                           floor: float = 1e-12, ceiling: float = 1e-2):
    """Fit the stretched-exponential decay rate of the bump's Fourier transform.

    Samples the bump on ``[-half_width, half_width)``, takes its DFT and fits
    ``log(log(max|F|) - log|F(k)|)`` against ``log k`` over the window where
    ``|F|/max`` lies in ``[floor, ceiling]``.  Returns ``(slope, r2)``; for a
    bump of Gevrey index h the slope estimates ``1/h``.
    """
    x = np.linspace(-half_width, half_width, n, endpoint=False)
    samples = bump(x)
    spec = np.abs(np.fft.rfft(samples))
    spec /= spec[0]
    k = np.fft.rfftfreq(n, d=(2.0 * half_width) / n) * 2.0 * np.pi
    mask = (spec > floor) & (spec < ceiling) & (k > 0)
    if mask.sum() < 16:
        raise ConfigError("not enough spectral points in the fit window")
    y = np.log(-np.log(spec[mask]))
    lx = np.log(k[mask])
    slope, intercept = np.polyfit(lx, y, 1)
    resid = y - (slope * lx + intercept)
    r2 = 1.0 - float(np.sum(resid**2)) / float(np.sum((y - y.mean()) ** 2))
    return float(slope), r2
