"""Sector-index algebra and momentum classification.

A sector is labeled by ``(j, s_plus, s_minus)``: the shell scale ``j`` and
one window index per rotated axis.  Admissibility at context ``j0``:

    s_pm in [max(0, (j - j0)/2), j]    and    s_plus + s_minus >= 3j/2 - j0/2.

Half-integer bookkeeping (``3j/2``, ``j0/2``) is done in doubled integers so
all comparisons are exact; the depth ``l = s_plus + s_minus - 3j/2 + j0/2``
is exposed as an exact :class:`fractions.Fraction` and as ``2l`` (integer).
The generalized scale is ``r = floor((j + s_plus + s_minus) / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cutoffs import GevreyBump, chi_j, sector_window
from .errors import ConfigError
from .geometry import fermi_surface, project_batch
from .model import ModelParams, Momentum, band_energy, band_gradient


@dataclass(frozen=True)
class SectorIndex:
    """Scale and window indices of one sector, with its admissibility context."""

    j: int
    splus: int
    sminus: int
    j0: int

    def __post_init__(self):
        if self.j < 0 or self.j0 < 0:
            raise ConfigError("scale indices must be non-negative")

    @property
    def two_l(self) -> int:
        """Twice the depth: ``2(s+ + s-) - 3j + j0`` (exact integer)."""
        return 2 * (self.splus + self.sminus) - 3 * self.j + self.j0

    @property
    def depth(self) -> Fraction:
        return Fraction(self.two_l, 2)

    @property
    def r(self) -> int:
        """Generalized scale ``floor((j + s+ + s-)/2)``."""
        return (self.j + self.splus + self.sminus) // 2

    def is_admissible(self) -> bool:
        lo = max(0, -(-(self.j - self.j0) // 2))  # ceil((j - j0)/2), clamped at 0
        if not (lo <= self.splus <= self.j and lo <= self.sminus <= self.j):
            return False
        return 2 * (self.splus + self.sminus) >= 3 * self.j - self.j0


def enumerate_sectors(j: int, j0: int) -> list[SectorIndex]:
    """All admissible sectors at scale ``j``, lexicographic in ``(s+, s-)``."""
    if j < 0:
        raise ConfigError(f"j must be >= 0, got {j}")
    lo = max(0, math.ceil((j - j0) / 2))
    out = []
    for sp in range(lo, j + 1):
        for sm in range(lo, j + 1):
            if 2 * (sp + sm) >= 3 * j - j0:
                out.append(SectorIndex(j, sp, sm, j0))
    return out


def depth_and_r(s: SectorIndex) -> tuple[Fraction, int]:
    """Exact depth and generalized scale of a sector."""
    ell = s.depth
    if ell < 0:
        raise ConfigError(f"sector {s} is not admissible (negative depth)")
    return ell, s.r


# ---------------------------------------------------------------------------
# membership classification


def _shell_memberships(t, params: ModelParams, bump: GevreyBump):
    """Shell indices ``j <= jmax`` whose cutoff is nonzero at ``t`` (<= 2 each)."""
    t = float(t)
    out = []
    if t > 1.0:
        out.append(0)
    if t > 0.0:
        # chi_j support for j >= 1: gamma^(-2j-2) < t < 2 gamma^(-2j+2)
        x = math.log(t, params.gamma)
        j_lo = max(1, math.ceil(-x / 2.0 - 1.0) - 1)
        j_hi = min(params.jmax, math.floor((math.log(2.0, params.gamma) - x) / 2.0 + 1.0) + 1)
        for j in range(j_lo, j_hi + 1):
            if j >= 1 and chi_j(t, j, bump, params.gamma) > 0.0:
                out.append(j)
    return out


def _window_memberships(q2, j, params: ModelParams, bump: GevreyBump):
    """Window indices ``s`` with ``v_s(q2) > 0`` at scale ``j`` (<= 2 each)."""
    q2 = float(q2)
    out = []
    if bump(params.gamma ** (2 * j) * q2) > 0.0:
        out.append(j)
    if q2 > 0.0:
        x = math.log(q2, params.gamma)
        s_lo = max(0, math.floor(-(x + math.log(2.0, params.gamma)) / 2.0) - 1)
        s_hi = min(j - 1, math.ceil(-x / 2.0))
        for s in range(s_lo, s_hi + 1):
            if 0 <= s < j and sector_window(q2, s, j, bump, params.gamma) > 0.0:
                out.append(s)
    return sorted(set(out))


def classify_momentum(k: Momentum, params: ModelParams, bump: GevreyBump | None = None,
                      admissible_only: bool = True) -> list[SectorIndex]:
    """All sectors whose composite cutoff is nonzero at ``k``.

    Quasi-momentum is measured from the nearest Fermi-surface point.  At most
    two shells and two windows per axis can overlap at any momentum.  With
    ``admissible_only`` (the default) the result is filtered by the sector
    admissibility constraints.
    """
    bump = bump or GevreyBump()
    e0 = band_energy(k.kplus, k.kminus, params)
    pp, pm, _ = project_batch(k.kplus, k.kminus, params)
    qp2 = (k.kplus - pp) ** 2
    qm2 = (k.kminus - pm) ** 2
    t = k.k0**2 + e0**2
    out = []
    for j in _shell_memberships(t, params, bump):
        for sp in _window_memberships(qp2, j, params, bump):
            for sm in _window_memberships(qm2, j, params, bump):
                sec = SectorIndex(j, sp, sm, params.j0)
                if admissible_only and not sec.is_admissible():
                    continue
                out.append(sec)
    return out


def membership_arrays(k0, e0, qp2, qm2, params: ModelParams, bump: GevreyBump | None = None,
                      admissible_only: bool = True, max_members: int = 12):
    """Vectorized membership classification from precomputed ingredients.

    Returns ``(j, sp, sm, count)`` integer arrays of shape ``(n, max_members)``
    (padded with -1) and the per-point membership counts.  At most two shells
    and two windows per axis can be active at any momentum; the scalar
    :func:`classify_momentum` is the reference implementation.
    """
    bump = bump or GevreyBump()
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    e0 = np.atleast_1d(np.asarray(e0, dtype=float))
    qp2 = np.atleast_1d(np.asarray(qp2, dtype=float))
    qm2 = np.atleast_1d(np.asarray(qm2, dtype=float))
    n = len(e0)
    t = k0**2 + e0**2
    g = params.gamma
    lg = math.log(g)

    with np.errstate(divide="ignore"):
        Lt = -np.log(np.maximum(t, 1e-300)) / (2.0 * lg)
        Lq_p = np.where(qp2 > 0.0, -np.log(np.maximum(qp2, 1e-300)) / (2.0 * lg), np.inf)
        Lq_m = np.where(qm2 > 0.0, -np.log(np.maximum(qm2, 1e-300)) / (2.0 * lg), np.inf)

    # shell candidates: chi_j != 0 iff j in (Lt, Lt + 1 + log_g(2)/2); plus j=0 for t > 1
    jfl = np.floor(Lt)
    j_cands = [np.zeros(n, dtype=np.int64), (jfl + 1).astype(np.int64), (jfl + 2).astype(np.int64)]

    def window_pair(q2, Lq, j):
        """Active window indices (up to 2 of {a, a+1} and the innermost s=j)."""
        a = np.floor(np.minimum(Lq, 1e9)).astype(np.int64)
        out = []
        ga = np.power(g, 2.0 * np.clip(a, -5, 10**6).astype(float))
        b0 = bump(ga * q2)
        b1 = bump(ga * g**2 * q2)
        b2 = bump(ga * g**4 * q2)
        for sc, val in ((a, b0 - b1), (a + 1, b1 - b2)):
            ok = (val > 0.0) & (sc >= 0) & (sc <= j - 1)
            out.append((sc, ok))
        inner = bump(np.power(g, 2.0 * j.astype(float)) * q2) > 0.0
        out.append((j, inner))
        return out

    hits_i, hits_j, hits_sp, hits_sm = [], [], [], []
    for jc in j_cands:
        jc = np.minimum(jc, params.jmax)
        chi_vals = np.empty(n)
        for jv in np.unique(jc):
            m = jc == jv
            chi_vals[m] = chi_j(t[m], int(jv), bump, g)
        shell_ok = chi_vals > 0.0
        if not shell_ok.any():
            continue
        for spc, okp in window_pair(qp2, Lq_p, jc):
            okp = okp & shell_ok
            if not okp.any():
                continue
            for smc, okm in window_pair(qm2, Lq_m, jc):
                ok = okp & okm
                if admissible_only:
                    lo = np.maximum(0, -((-(jc - params.j0)) // 2))
                    ok = ok & (spc >= lo) & (smc >= lo) & (2 * (spc + smc) >= 3 * jc - params.j0)
                idx = np.where(ok)[0]
                if len(idx):
                    hits_i.append(idx)
                    hits_j.append(jc[idx])
                    hits_sp.append(spc[idx])
                    hits_sm.append(smc[idx])

    js = np.full((n, max_members), -1, dtype=np.int64)
    sps = np.full((n, max_members), -1, dtype=np.int64)
    sms = np.full((n, max_members), -1, dtype=np.int64)
    count = np.zeros(n, dtype=np.int64)
    if hits_i:
        hi = np.concatenate(hits_i)
        hj = np.concatenate(hits_j)
        hp = np.concatenate(hits_sp)
        hm = np.concatenate(hits_sm)
        jmax1 = params.jmax + 2
        key = ((hi * jmax1 + hj) * jmax1 + hp) * jmax1 + hm
        _, sel = np.unique(key, return_index=True)
        hi, hj, hp, hm = hi[sel], hj[sel], hp[sel], hm[sel]
        order = np.argsort(hi, kind="stable")
        hi, hj, hp, hm = hi[order], hj[order], hp[order], hm[order]
        slot = np.arange(len(hi)) - np.searchsorted(hi, hi, side="left")
        keep = slot < max_members
        js[hi[keep], slot[keep]] = hj[keep]
        sps[hi[keep], slot[keep]] = hp[keep]
        sms[hi[keep], slot[keep]] = hm[keep]
        np.add.at(count, hi[keep], 1)
    return js, sps, sms, count


def _window_values(q2, s, j, bump, gamma):
    """Vectorized ``v_s(q2)`` with per-point indices ``s <= j``."""
    q2 = np.asarray(q2, dtype=float)
    out = np.zeros_like(q2)
    inner = s == j
    if np.any(inner):
        out[inner] = bump(gamma ** (2.0 * j[inner]) * q2[inner])
    outer = ~inner
    if np.any(outer):
        so = s[outer].astype(float)
        out[outer] = (bump(gamma ** (2.0 * so) * q2[outer])
                      - bump(gamma ** (2.0 * so + 2.0) * q2[outer]))
    return out


# ---------------------------------------------------------------------------
# conservation constraint


def vertex_constraint(sigmas) -> bool:
    """Momentum-conservation compatibility of four sector indices.

    Per axis, either the two smallest window indices differ by at most one,
    or the smallest one equals its own shell scale and that shell scale is
    strictly below the other three.
    """
    if len(sigmas) != 4:
        raise ConfigError("vertex_constraint expects exactly 4 sector indices")
    for sec in sigmas:
        if not sec.is_admissible():
            raise ConfigError(f"sector {sec} is not admissible")
    jv = np.array([[s.j for s in sigmas]])
    sp = np.array([[s.splus for s in sigmas]])
    sm = np.array([[s.sminus for s in sigmas]])
    return bool(vertex_constraint_arrays(jv, sp, sm)[0])


def vertex_constraint_arrays(j, splus, sminus):
    """Vectorized constraint over rows of four sectors; returns a bool array."""
    j = np.asarray(j)
    ok = np.ones(len(j), dtype=bool)
    for s in (np.asarray(splus), np.asarray(sminus)):
        order = np.argsort(s, axis=1, kind="stable")
        s_sorted = np.take_along_axis(s, order, axis=1)
        gap_ok = (s_sorted[:, 1] - s_sorted[:, 0]) <= 1
        j_of_min = np.take_along_axis(j, order[:, :1], axis=1)[:, 0]
        j_sorted_rest = np.sort(np.take_along_axis(j, order[:, 1:], axis=1), axis=1)
        escape = (s_sorted[:, 0] == j_of_min) & (j_of_min < j_sorted_rest[:, 0])
        ok &= gap_ok | escape
    return ok


def counting_sum(j: int, j0: int, sigma4: SectorIndex, gamma: float = 10.0) -> float:
    """Weighted count of constraint-compatible sector triples at scale ``j``.

    Sums ``gamma**(-(l1+l2+l3)/4)`` over admissible ``(sigma1, sigma2, sigma3)``
    passing :func:`vertex_constraint` against the fixed ``sigma4``; the ratio
    of the sum to ``j + j0`` stays bounded across scales.
    """
    if not sigma4.is_admissible():
        raise ConfigError(f"sigma4 {sigma4} is not admissible")
    secs = enumerate_sectors(j, j0)
    sp = np.array([s.splus for s in secs])
    sm = np.array([s.sminus for s in secs])
    tl = np.array([s.two_l for s in secs])
    n = len(secs)
    i1, i2, i3 = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    i1, i2, i3 = i1.ravel(), i2.ravel(), i3.ravel()
    m = len(i1)
    js = np.full((m, 4), j)
    sps = np.column_stack([sp[i1], sp[i2], sp[i3], np.full(m, sigma4.splus)])
    sms = np.column_stack([sm[i1], sm[i2], sm[i3], np.full(m, sigma4.sminus)])
    ok = vertex_constraint_arrays(js, sps, sms)
    weights = gamma ** (-(tl[i1] + tl[i2] + tl[i3]) / 8.0)
    return float(np.sum(weights[ok]))


# ---------------------------------------------------------------------------
# randomized conservation sampler


def sample_shell_points(params: ModelParams, j_values, rng, bump: GevreyBump | None = None):
    """Random momenta inside given shells, built as surface point + normal offset.

    Returns ``(kplus, kminus, e0, qplus, qminus)``; the quasi-momentum is known
    exactly by construction.  ``j_values`` is an integer array choosing the
    spatial shell (|e0| window) per point.
    """
    bump = bump or GevreyBump()
    curve = fermi_surface(params)
    # stay inside the curvature reach so the constructed offset is the true
    # quasi-momentum (global bound: the medial axis is at least R_min away)
    reach = 0.8 * float(np.min(curve.radius))
    n = len(j_values)
    phi = rng.uniform(np.pi / 4.0, np.pi / 2.0, n)
    kp, km, np_, nm, radius = curve.point_at(phi)
    # random symmetry image
    swap = rng.integers(0, 2, n).astype(bool)
    sgnp = rng.choice([-1.0, 1.0], n)
    sgnm = rng.choice([-1.0, 1.0], n)
    kp, km = np.where(swap, km, kp), np.where(swap, kp, km)
    np_, nm = np.where(swap, nm, np_), np.where(swap, np_, nm)
    kp, np_ = kp * sgnp, np_ * sgnp
    km, nm = km * sgnm, nm * sgnm
    # signed band-energy target within the spatial shell, inverted by bisection
    u = rng.uniform(params.gamma ** (-1.0), np.sqrt(2.0), n) * params.gamma ** (-j_values.astype(float))
    side = rng.choice([-1.0, 1.0], n)
    t = _invert_band_offset(kp, km, np_, nm, side * u, params, cap=reach)
    qp, qm = t * np_, t * nm
    e0 = band_energy(kp + qp, km + qm, params)
    return kp + qp, km + qm, e0, qp, qm


def _invert_band_offset(kp, km, nplus, nminus, target, params, iters=42, cap=None):
    """Solve ``e0(P + t n) = target`` for signed ``t`` by bisection.

    Offsets are capped (default 2.0, or per-point ``cap``) so constructed
    points stay within the curvature reach of their base point; when the
    target level is not reachable under the cap the capped offset is returned.
    """
    hi_mag = np.full_like(kp, 2.0) if cap is None else np.minimum(np.asarray(cap), 2.0)
    sgn = np.sign(target)
    lo = np.zeros_like(kp)
    hi = sgn * hi_mag

    def e_at(t):
        return band_energy(kp + t * nplus, km + t * nminus, params)

    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = e_at(mid)
        below = sgn * val < sgn * target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def fold_to_zone(kp, km):
    """Reduce rotated coordinates modulo the rotated dual lattice."""
    a = np.round((kp + km) / (4.0 * np.pi))
    b = np.round((kp - km) / (4.0 * np.pi))
    return kp - 2.0 * np.pi * (a + b), km - 2.0 * np.pi * (a - b)


def sample_conserving_quadruples(params: ModelParams, n: int, seed: int,
                                 bump: GevreyBump | None = None, grid: int = 96):
    """Exactly momentum-conserving quadruples near the Fermi surface.

    Conservation is realized the way the sector bookkeeping assumes it: four
    surface points summing to zero modulo the dual lattice carry four normal
    offsets that sum to zero themselves, so the total momentum vanishes and
    every quasi-momentum is known by construction.  Two offsets are drawn at
    random band-energy levels; the other two solve the 2x2 balance.  Samples
    with an ill-conditioned balance, with offsets beyond the curvature reach,
    or without a root for the fourth surface point are dropped, so the
    returned count is below ``n``.

    Returns a dict of ``(4, m)`` arrays: ``kplus, kminus, e0, qp2, qm2``.
    """
    bump = bump or GevreyBump()
    rng = np.random.default_rng(seed)
    curve = fermi_surface(params)
    reach = 0.8 * float(np.min(curve.radius))
    kc = curve.k_corner

    def rand_image(n_):
        return (rng.integers(0, 2, n_).astype(bool),
                rng.integers(0, 2, n_) * 2.0 - 1.0, rng.integers(0, 2, n_) * 2.0 - 1.0)

    def curve_point(u, swap, sgp, sgm):
        """Curve point plus outward normal."""
        kp = u
        km = curve.km_of_kp(kp)
        gp, gm = band_gradient(kp, km)
        nr = np.hypot(gp, gm)
        npl, nmi = gp / nr, gm / nr
        kp, km = np.where(swap, km, kp), np.where(swap, kp, km)
        npl, nmi = np.where(swap, nmi, npl), np.where(swap, npl, nmi)
        return kp * sgp, km * sgm, npl * sgp, nmi * sgm

    u12 = rng.uniform(0.0, kc, size=(2, n))
    im1, im2, im3 = rand_image(n), rand_image(n), rand_image(n)
    p1p, p1m, n1p, n1m = curve_point(u12[0], *im1)
    p2p, p2m, n2p, n2m = curve_point(u12[1], *im2)
    cp, cm = -(p1p + p2p), -(p1m + p2m)

    # Sweep the third surface point along its image; the fourth point is the
    # balance and must land back on the surface (root of the band energy).
    # Parameterize the octant arc by x = cos(kplus/2); the ordinate has
    # cos(kminus/2) = m/(2x), so sweep and bisection are purely algebraic.
    # The band energy is invariant under the rotated dual lattice, so no
    # folding is needed until output.
    mhalf = curve.m / 2.0
    x_corner = math.sqrt(mhalf)
    ap, bp_ = np.cos(cp / 2.0), np.sin(cp / 2.0)
    am, bm_ = np.cos(cm / 2.0), np.sin(cm / 2.0)
    w3, s3p, s3m = im3

    xg = np.linspace(x_corner, 1.0, grid)
    yg = mhalf / xg
    xsg = np.sqrt(np.maximum(1.0 - xg * xg, 0.0))
    ysg = np.sqrt(np.maximum(1.0 - yg * yg, 0.0))
    bps, bms = bp_ * s3p, bm_ * s3m
    sign_change = np.empty((n, grid - 1), dtype=bool)
    for flag, cx, sx, cy, sy in ((False, xg, xsg, yg, ysg), (True, yg, ysg, xg, xsg)):
        rowsel = np.where(w3 == flag)[0]
        if not len(rowsel):
            continue
        f1 = np.outer(ap[rowsel], cx) + np.outer(bps[rowsel], sx)
        f2 = np.outer(am[rowsel], cy) + np.outer(bms[rowsel], sy)
        f1 *= f2
        sb = np.signbit(params.mu0 - 2.0 * f1)
        sign_change[rowsel] = sb[:, :-1] ^ sb[:, 1:]
    nbr = sign_change.sum(axis=1)
    has = nbr > 0
    # pick a random bracket among the sign changes of each sample
    scores = rng.random((n, grid - 1)) * sign_change
    bracket = np.argmax(scores, axis=1)

    keep = np.where(has)[0]
    w3k, s3pk, s3mk = w3[keep], s3p[keep], s3m[keep]
    apk, bpk = ap[keep], (bp_ * s3p)[keep]
    amk, bmk = am[keep], (bm_ * s3m)[keep]
    cpk, cmk = cp[keep], cm[keep]

    def e4_of(x):
        y = mhalf / x
        xs = np.sqrt(np.maximum(1.0 - x * x, 0.0))
        ys = np.sqrt(np.maximum(1.0 - y * y, 0.0))
        g1 = apk * np.where(w3k, y, x) + bpk * np.where(w3k, ys, xs)
        g2 = amk * np.where(w3k, x, y) + bmk * np.where(w3k, xs, ys)
        return params.mu0 - 2.0 * g1 * g2

    lo = xg[bracket[keep]]
    hi = xg[bracket[keep] + 1]
    f_lo = e4_of(lo)
    for _ in range(46):
        mid = 0.5 * (lo + hi)
        f_mid = e4_of(mid)
        same = f_lo * f_mid > 0.0
        lo = np.where(same, mid, lo)
        f_lo = np.where(same, f_mid, f_lo)
        hi = np.where(same, hi, mid)
    u3 = 2.0 * np.arccos(np.clip(0.5 * (lo + hi), -1.0, 1.0))
    p3p, p3m, n3p, n3m = curve_point(u3, w3k, s3pk, s3mk)
    p4p, p4m = fold_to_zone(cpk - p3p, cmk - p3m)
    g4p, g4m = band_gradient(p4p, p4m)
    nr4 = np.hypot(g4p, g4m)
    n4p, n4m = g4p / nr4, g4m / nr4

    # offsets: two drawn at random band-energy levels, two solved so that the
    # four quasi-momenta sum to zero
    m = len(keep)
    b1p, b1m, v1p, v1m = p1p[keep], p1m[keep], n1p[keep], n1m[keep]
    b2p, b2m, v2p, v2m = p2p[keep], p2m[keep], n2p[keep], n2m[keep]
    jt = rng.integers(1, max(2, params.jmax), size=(2, m))
    lv = (rng.uniform(params.gamma ** (-1.0), np.sqrt(2.0), size=(2, m))
          * params.gamma ** (-jt.astype(float)) * rng.choice([-1.0, 1.0], size=(2, m)))
    t1 = _invert_band_offset(b1p, b1m, v1p, v1m, lv[0], params, cap=reach)
    t2 = _invert_band_offset(b2p, b2m, v2p, v2m, lv[1], params, cap=reach)
    rp = -(t1 * v1p + t2 * v2p)
    rm = -(t1 * v1m + t2 * v2m)
    det = n3p * n4m - n3m * n4p
    good = np.abs(det) > 1e-6  # reach check below bounds the solved offsets
    with np.errstate(divide="ignore", invalid="ignore"):
        t3 = (rp * n4m - rm * n4p) / det
        t4 = (n3p * rm - n3m * rp) / det
    good &= (np.abs(t3) <= reach) & (np.abs(t4) <= reach)

    g = np.where(good)[0]
    t1, t2, t3, t4 = t1[g], t2[g], t3[g], t4[g]
    bases = [(b1p[g], b1m[g], v1p[g], v1m[g], t1),
             (b2p[g], b2m[g], v2p[g], v2m[g], t2),
             (p3p[g], p3m[g], n3p[g], n3m[g], t3),
             (p4p[g], p4m[g], n4p[g], n4m[g], t4)]
    kplus = np.stack([bp + t * vp for bp, _, vp, _, t in bases])
    kminus = np.stack([bm + t * vm for _, bm, _, vm, t in bases])
    e0 = np.stack([band_energy(kplus[i], kminus[i], params) for i in range(4)])
    qp2 = np.stack([(t * vp) ** 2 for _, _, vp, _, t in bases])
    qm2 = np.stack([(t * vm) ** 2 for _, _, _, vm, t in bases])
    return {"kplus": kplus, "kminus": kminus, "e0": e0, "qp2": qp2, "qm2": qm2}
def check_quadruple_constraint(js, sps, sms, counts, rows):
    """Run the conservation constraint over every membership combination.

    ``js, sps, sms`` have shape ``(4, n, max_members)`` and ``counts`` shape
    ``(4, n)``; ``rows`` selects the quadruples to expand.  Returns
    ``(checks, violations)``.
    """
    checks = 0
    violations = 0
    c = [counts[i][rows] for i in range(4)]
    for a in range(int(c[0].max(initial=0))):
        for b in range(int(c[1].max(initial=0))):
            for d3 in range(int(c[2].max(initial=0))):
                for d4 in range(int(c[3].max(initial=0))):
                    ok = (a < c[0]) & (b < c[1]) & (d3 < c[2]) & (d4 < c[3])
                    if not ok.any():
                        continue
                    sel = rows[ok]
                    combo = (a, b, d3, d4)
                    jr = np.stack([js[i][sel, combo[i]] for i in range(4)], axis=1)
                    spr = np.stack([sps[i][sel, combo[i]] for i in range(4)], axis=1)
                    smr = np.stack([sms[i][sel, combo[i]] for i in range(4)], axis=1)
                    res = vertex_constraint_arrays(jr, spr, smr)
                    checks += len(res)
                    violations += int((~res).sum())
    return checks, violations


def sector_table_rows(j: int, j0: int):
    """Rows ``(j, s_plus, s_minus, two_l, r)`` for CSV export."""
    return [(s.j, s.splus, s.sminus, s.two_l, s.r) for s in enumerate_sectors(j, j0)]
