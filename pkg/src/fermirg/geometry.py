"""Fermi-surface geometry: projections, curvature radii, shell widths.

The non-interacting Fermi surface in rotated coordinates is the level set

    2 cos(kplus/2) cos(kminus/2) = m,      m = mu0,

a closed convex curve near the square ``max(|kplus|, |kminus|) = pi`` when
``mu0`` is small.  Shell boundaries are the same family of curves at levels
``m = mu0 -+ gamma**(-j)``.

A curve is represented by a table over one octant parameterized by the
outward normal angle ``phi`` (``phi = pi/2`` at the face center on the
``kplus = 0`` axis, ``phi = pi/4`` at the zone-diagonal corner); the rest of
the curve follows from the eight square symmetries.  Because ``phi`` is the
normal angle, the arc measure is exactly ``ds = R(phi) dphi`` with ``R`` the
curvature radius, which the quadrature engines rely on.

Projections are torus-aware: momenta near the zone boundary may project onto
a lattice-translated image of the surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .errors import AmbiguousProjection, ConfigError, DegeneratePoint
from .model import ModelParams, band_energy, band_gradient

#: two projection candidates closer than this are reported as ambiguous
TIE_TOL = 1e-10

# the eight square symmetries (sign flips and axis swap) as (swap, sp, sm):
# (kp, km) -> (sp*km, sm*kp) if swap else (sp*kp, sm*km)
_OPS = [(swap, sp, sm) for swap in (False, True) for sp in (1, -1) for sm in (1, -1)]

# lattice translates of the rotated zone relevant for torus distances
_TRANSLATES = np.array([[0.0, 0.0], [2 * np.pi, 2 * np.pi], [-2 * np.pi, -2 * np.pi],
                        [2 * np.pi, -2 * np.pi], [-2 * np.pi, 2 * np.pi]])


@dataclass(frozen=True)
class FermiPoint:
    """Point on the Fermi surface with attached frame data."""

    kplus: float
    kminus: float
    tangent: tuple[float, float]
    normal: tuple[float, float]
    curvature_radius: float


def level_curvature_radius(kplus, kminus, m):
    """Curvature radius of the level curve ``2 cos cos = m`` through ``(kplus, kminus)``.

    Closed form ``4 [c+^2 s-^2 + s+^2 c-^2]^(3/2) / (m (s+^2 + s-^2))``;
    raises :class:`DegeneratePoint` when the denominator vanishes.
    """
    kp = np.asarray(kplus, dtype=float)
    km = np.asarray(kminus, dtype=float)
    cp, sp = np.cos(kp / 2), np.sin(kp / 2)
    cm, sm = np.cos(km / 2), np.sin(km / 2)
    num = 4.0 * (cp**2 * sm**2 + sp**2 * cm**2) ** 1.5
    den = m * (sp**2 + sm**2)
    if np.any(np.abs(den) < 1e-14):
        raise DegeneratePoint(f"curvature denominator vanished at level m={m}")
    out = num / den
    if out.ndim == 0:
        return float(out)
    return out


class LevelCurve:
    """Octant table of the level curve ``2 cos(kp/2) cos(km/2) = m``, ``0 < m < 2``.

    The octant is ``0 <= kplus <= kminus`` (normal angles ``pi/4 <= phi <= pi/2``).
    """

    def __init__(self, m: float, n_nodes: int = 2048):
        if not 0.0 < m < 2.0:
            raise ConfigError(f"level must be in (0, 2), got {m}")
        self.m = float(m)
        # corner (diagonal) and face-center parameters
        self.k_corner = 2.0 * math.acos(math.sqrt(m / 2.0))
        self.k_face = 2.0 * math.acos(m / 2.0)
        self.phi = np.linspace(np.pi / 4.0, np.pi / 2.0, n_nodes)
        self.kplus = self._solve_kplus(self.phi)
        self.kminus = self.km_of_kp(self.kplus)
        gp, gm = band_gradient(self.kplus, self.kminus)
        norm = np.hypot(gp, gm)
        self.nplus, self.nminus = gp / norm, gm / norm
        self.radius = level_curvature_radius(self.kplus, self.kminus, m)

    def km_of_kp(self, kplus):
        """Ordinate of the curve: ``kminus = 2 arccos(m / (2 cos(kplus/2)))``."""
        c = self.m / (2.0 * np.cos(np.asarray(kplus, dtype=float) / 2.0))
        return 2.0 * np.arccos(np.clip(c, -1.0, 1.0))

    def normal_angle(self, kplus):
        kp = np.asarray(kplus, dtype=float)
        km = self.km_of_kp(kp)
        gp, gm = band_gradient(kp, km)
        return np.arctan2(gm, gp)

    def _solve_kplus(self, phi):
        """Invert the normal angle on the octant by bisection (phi decreasing in kplus)."""
        lo = np.zeros_like(phi)
        hi = np.full_like(phi, self.k_corner)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            above = self.normal_angle(mid) > phi
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out = 0.5 * (lo + hi)
        # pin the exact endpoints
        out[np.isclose(phi, np.pi / 2.0)] = 0.0
        out[np.isclose(phi, np.pi / 4.0)] = self.k_corner
        return out

    def point_at(self, phi):
        """Curve point, outward normal, tangent and radius at normal angle(s) ``phi``."""
        phi = np.asarray(phi, dtype=float)
        kp = self._solve_kplus(np.atleast_1d(phi))
        km = self.km_of_kp(kp)
        gp, gm = band_gradient(kp, km)
        norm = np.hypot(gp, gm)
        np_, nm = gp / norm, gm / norm
        R = level_curvature_radius(kp, km, self.m)
        return kp, km, np_, nm, np.atleast_1d(R)

    def octant_points(self):
        return np.column_stack([self.kplus, self.kminus])

    def full_curve_points(self, stride: int = 1):
        """All eight symmetry images of the octant table (deduplication not needed)."""
        pts = self.octant_points()[::stride]
        images = []
        for swap, sp, sm in _OPS:
            p = pts[:, ::-1] if swap else pts
            images.append(p * np.array([sp, sm]))
        return np.vstack(images)


@lru_cache(maxsize=32)
def _curve(m: float, n_nodes: int = 2048) -> LevelCurve:
    return LevelCurve(m, n_nodes)


@lru_cache(maxsize=32)
def _projection_tree(m: float):
    """KD-tree over dense samples of the curve and its four zone translates."""
    curve = _curve(m, 4096)
    base = curve.full_curve_points()
    pts = np.vstack([base + t for t in _TRANSLATES])
    n_img = len(base)
    return cKDTree(pts), n_img, curve


def fermi_surface(params: ModelParams) -> LevelCurve:
    """The non-interacting Fermi surface table for these parameters."""
    return _curve(params.mu0)


def shell_curve(params: ModelParams, j: int, sign: int) -> LevelCurve:
    """Shell boundary ``F^(j),+/-`` at level ``mu0 -+ gamma**(-j)``."""
    m = params.mu0 - sign * params.gamma ** (-j)
    if m <= 0.0:
        raise DegeneratePoint(f"shell level {m} <= 0 (flat-face limit exceeded)")
    return _curve(m)


def _fold_to_octant(kp, km):
    """Map points to the fundamental octant; returns folded coords and op index."""
    sp = np.where(kp < 0, -1, 1)
    sm = np.where(km < 0, -1, 1)
    akp, akm = np.abs(kp), np.abs(km)
    swap = akp > akm
    fkp = np.where(swap, akm, akp)
    fkm = np.where(swap, akp, akm)
    return fkp, fkm, swap, sp, sm


def _unfold(pkp, pkm, swap, sp, sm):
    okp = np.where(swap, pkm, pkp)
    okm = np.where(swap, pkp, pkm)
    return sp * okp, sm * okm


def project_batch(kplus, kminus, params: ModelParams, refine_iters: int = 5):
    """Project momenta onto the Fermi surface (vectorized, torus-aware).

    Returns ``(pplus, pminus, dist)`` where ``(pplus, pminus)`` is the nearest
    surface point (possibly on a lattice translate) and ``dist`` the Euclidean
    distance.  No ambiguity detection; see :func:`project_to_fs` for the
    scalar front end with tie handling.
    """
    kp = np.atleast_1d(np.asarray(kplus, dtype=float))
    km = np.atleast_1d(np.asarray(kminus, dtype=float))
    tree, n_img, curve = _projection_tree(params.mu0)
    q = np.column_stack([kp, km])
    _, idx = tree.query(q, workers=-1)
    t_idx = idx // n_img
    shift = _TRANSLATES[t_idx]
    local = q - shift  # bring the query next to the base curve image
    fkp, fkm, swap, sp, sm = _fold_to_octant(local[:, 0], local[:, 1])

    # Newton refinement of the foot in the octant chart, seeded by the curve
    # abscissa of the matched table row: solve (k - P) . tangent(P) = 0 in the
    # abscissa kplus of the curve point P
    n_table = len(curve.phi)
    pkp = curve.kplus[idx % n_table].copy()
    for _ in range(refine_iters):
        pkp = np.clip(pkp, 0.0, curve.k_corner)
        pkm = curve.km_of_kp(pkp)
        gp_, gm_ = band_gradient(pkp, pkm)
        norm = np.hypot(gp_, gm_)
        np_, nm = gp_ / norm, gm_ / norm
        R = level_curvature_radius(pkp, pkm, params.mu0)
        dxp, dxm = fkp - pkp, fkm - pkm
        g = dxp * nm - dxm * np_  # (k - P) . tangent
        gprime = -(norm / gm_) * (1.0 + (dxp * np_ + dxm * nm) / R)
        step = np.clip(g / gprime, -0.2, 0.2)
        pkp = pkp - step
    pkp = np.clip(pkp, 0.0, curve.k_corner)
    pkm = curve.km_of_kp(pkp)
    okp, okm = _unfold(pkp, pkm, swap, sp, sm)
    pp = okp + shift[:, 0]
    pm = okm + shift[:, 1]
    dist = np.hypot(kp - pp, km - pm)
    if np.ndim(kplus) == 0:
        return float(pp[0]), float(pm[0]), float(dist[0])
    return pp, pm, dist


def surface_point(kplus_on_fs: float, params: ModelParams) -> FermiPoint:
    """Frame data for a point already on the Fermi surface (first octant by kplus)."""
    curve = fermi_surface(params)
    km = float(curve.km_of_kp(kplus_on_fs))
    gp, gm = band_gradient(kplus_on_fs, km)
    norm = math.hypot(gp, gm)
    n = (gp / norm, gm / norm)
    t = (n[1], -n[0])
    return FermiPoint(kplus_on_fs, km, t, n, level_curvature_radius(kplus_on_fs, km, params.mu0))


def project_to_fs(kplus: float, kminus: float, params: ModelParams) -> FermiPoint:
    """Nearest Fermi-surface point for a single momentum.

    Detects equidistant mirror candidates (within ``TIE_TOL``): prefers the
    candidate with smaller ``|kplus - kminus|``; raises
    :class:`AmbiguousProjection` when the tie-break cannot separate them
    (zone-diagonal symmetry points), with both candidates attached.
    """
    e0 = band_energy(kplus, kminus, params)
    if abs(e0) >= 1.0:
        raise ConfigError(f"momentum outside the infrared region, |e0|={abs(e0):.3f} >= 1")
    pp, pm, dist = project_batch(kplus, kminus, params)

    # the competing feet for a query are symmetry images of the found one
    best = np.array([pp, pm])
    cands = []
    for swap, sp, sm in _OPS:
        for t in _TRANSLATES:
            b = best - t
            img = np.array([b[1], b[0]]) if swap else b
            img = img * np.array([sp, sm]) + t
            d = math.hypot(kplus - img[0], kminus - img[1])
            if d <= dist + TIE_TOL and not any(np.allclose(img, c, atol=1e-9) for c in cands):
                cands.append(img)
    if len(cands) > 1:
        spread = [abs(c[0] - c[1]) for c in cands]
        order = np.argsort(spread)
        if spread[order[1]] - spread[order[0]] <= 1e-9:
            raise AmbiguousProjection(
                f"projection of ({kplus:.6f}, {kminus:.6f}) has equidistant candidates",
                [tuple(c) for c in cands],
            )
        pp, pm = cands[order[0]]

    gp, gm = band_gradient(pp, pm)
    norm = math.hypot(gp, gm)
    n = (gp / norm, gm / norm)
    t = (n[1], -n[0])
    return FermiPoint(float(pp), float(pm), t, n, level_curvature_radius(pp, pm, params.mu0))


def curvature_radius(kplus: float, kminus: float, params: ModelParams,
                     j: int | None = None, sign: int = 1) -> float:
    """Curvature radius of the surface (``j=None``) or shell boundary at the point."""
    if j is None:
        m = params.mu0
    else:
        m = params.mu0 - sign * params.gamma ** (-j)
        if m <= 0.0:
            raise DegeneratePoint(f"level {m} <= 0: curvature radius diverges (flat face)")
    return level_curvature_radius(kplus, kminus, m)


def curvature_extrema(params: ModelParams, j: int | None = None, sign: int = 1):
    """Exact curvature-radius extrema of a level curve and where they occur.

    Returns ``((rmax, face_point), (rmin, corner_point))``: the maximum sits
    at the face center ``(0, 2 arccos(m/2))`` with ``R = 4 sqrt(1-m^2/4)/m``;
    the minimum at the diagonal corner ``kplus = kminus = 2 arccos(sqrt(m/2))``
    where the closed form evaluates to ``R = 2 sqrt(m) sqrt(1-m/2)``.
    """
    m = params.mu0 if j is None else params.mu0 - sign * params.gamma ** (-j)
    if m <= 0.0:
        raise DegeneratePoint("flat-face limit: maximal curvature radius diverges")
    face = (0.0, 2.0 * math.acos(m / 2.0))
    corner_k = 2.0 * math.acos(math.sqrt(m / 2.0))
    corner = (corner_k, corner_k)
    rmax = 4.0 * math.sqrt(1.0 - m * m / 4.0) / m
    rmin = 2.0 * math.sqrt(m) * math.sqrt(1.0 - m / 2.0)
    return (rmax, face), (rmin, corner)


def shell_width(point, j: int, params: ModelParams):
    """Normal width ``delta^j`` of shell ``j`` at a surface point.

    Closed form ``gamma**-j / (2 sqrt(u - mu0^2/4) + 2 sqrt(u - mu0^2/4 + mu0 gamma**-j))``
    with ``u = max(cos^2(kplus/2), cos^2(kminus/2))`` (the symmetric extension:
    the displayed form parameterizes the curve by the coordinate running along
    the face).  ``point`` may be a :class:`FermiPoint` or a ``(kplus, kminus)``
    pair on the surface.
    """
    if j > params.jmax:
        raise ConfigError(f"j={j} exceeds jmax={params.jmax}")
    kp, km = (point.kplus, point.kminus) if isinstance(point, FermiPoint) else point
    u = max(math.cos(kp / 2.0) ** 2, math.cos(km / 2.0) ** 2)
    g = params.gamma ** (-j)
    base = u - params.mu0**2 / 4.0
    if base < 1e-14 and base + params.mu0 * g < 1e-14:
        raise DegeneratePoint("shell width denominator vanished")
    return g / (2.0 * math.sqrt(max(base, 0.0)) + 2.0 * math.sqrt(base + params.mu0 * g))


def chord_width(radius: float, delta: float) -> float:
    """Chord length ``sqrt(R * delta)`` of a cap of sagitta ``delta``."""
    if radius <= 0.0 or delta <= 0.0:
        raise ConfigError("chord_width needs positive radius and depth")
    return math.sqrt(radius * delta)


def band_level_offset(curve: LevelCurve, phi, target, side: int, params: ModelParams,
                      iters: int = 40):
    """Signed normal offsets ``t`` with ``|e0(P + t n)| = target`` on one side.

    ``side = +1`` solves outward (band energy ``+target``), ``side = -1``
    inward.  Vectorized bisection; offsets are capped at 90% of the local
    curvature radius (approaching the cut locus is a usage error upstream).
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    pkp, pkm, np_, nm, R = curve.point_at(phi)
    cap = 0.9 * R

    def e_at(t):
        return band_energy(pkp + t * np_, pkm + t * nm, params)

    lo = np.zeros_like(phi)
    hi = side * cap
    f_hi = side * e_at(hi)
    # target must be bracketed; clamp to the cap when the band never reaches it
    reachable = f_hi >= target
    hi = np.where(reachable, hi, side * cap)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = side * e_at(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return np.where(reachable, out, side * cap)


def surface_table_rows(params: ModelParams, j: int, n: int = 256):
    """Rows ``(kplus, kminus, curvature_radius, shell_width)`` for CSV export."""
    curve = fermi_surface(params)
    phi = np.linspace(np.pi / 4.0, np.pi / 2.0, n)
    kp, km, _, _, R = curve.point_at(phi)
    rows = []
    for a, b, r in zip(kp, km, R):
        rows.append((float(a), float(b), float(r), shell_width((float(a), float(b)), j, params)))
    return rows
