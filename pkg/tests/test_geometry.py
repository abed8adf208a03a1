import math

import numpy as np
import pytest
from scipy.spatial import cKDTree

from fermirg.errors import AmbiguousProjection, ConfigError, DegeneratePoint
from fermirg.model import ModelParams, band_energy
from fermirg import geometry as G


def fd_curvature_radius(kplus, m, h=1e-5):
    """Independent oracle: curvature of the implicit level curve by central
    finite differences of g = 2 cos(kp/2) cos(km/2) - m."""

    def g(x, y):
        return 2.0 * np.cos(x / 2.0) * np.cos(y / 2.0) - m

    kminus = 2.0 * np.arccos(m / (2.0 * np.cos(kplus / 2.0)))
    x, y = kplus, kminus
    gx = (g(x + h, y) - g(x - h, y)) / (2 * h)
    gy = (g(x, y + h) - g(x, y - h)) / (2 * h)
    gxx = (g(x + h, y) - 2 * g(x, y) + g(x - h, y)) / h**2
    gyy = (g(x, y + h) - 2 * g(x, y) + g(x, y - h)) / h**2
    gxy = (g(x + h, y + h) - g(x + h, y - h) - g(x - h, y + h) + g(x - h, y - h)) / (4 * h**2)
    kappa = abs(gxx * gy**2 - 2 * gxy * gx * gy + gyy * gx**2) / (gx**2 + gy**2) ** 1.5
    return 1.0 / kappa


def dense_projection_oracle(mu0, n=1_000_000):
    """Brute-force nearest point over dense uniform-abscissa curve samples."""
    curve = G.fermi_surface(ModelParams(mu0=mu0, temperature=0.01))
    kk = np.linspace(0.0, curve.k_corner, n)
    pts = np.column_stack([kk, curve.km_of_kp(kk)])
    full = np.vstack([
        (pts[:, ::-1] if swap else pts) * np.array([sp, sm])
        for swap in (False, True) for sp in (1, -1) for sm in (1, -1)
    ])
    full = np.vstack([full + t for t in G._TRANSLATES])
    return cKDTree(full)


class TestCurvature:
    @pytest.mark.parametrize("mu0", [0.1, 0.01])
    def test_closed_form_vs_finite_differences(self, mu0):
        params = ModelParams(mu0=mu0, temperature=0.01)
        curve = G.fermi_surface(params)
        kp = np.linspace(1e-3, curve.k_corner * 0.999, 1000)
        km = curve.km_of_kp(kp)
        closed = G.level_curvature_radius(kp, km, mu0)
        oracle = fd_curvature_radius(kp, mu0)
        assert np.max(np.abs(closed - oracle) / oracle) < 1e-4

    def test_face_center_maximum(self):
        # value frozen from the closed form at mu0 = 0.2: 4 sqrt(1 - 0.01) / 0.2
        params = ModelParams(mu0=0.2, temperature=0.01)
        (rmax, face), _ = G.curvature_extrema(params)
        assert rmax == pytest.approx(19.8997487421324, abs=1e-8)
        assert G.level_curvature_radius(face[0], face[1], 0.2) == pytest.approx(rmax, abs=1e-10)

    def test_corner_minimum_matches_fd_oracle(self):
        # the general closed form at the diagonal corner gives 2 sqrt(m) sqrt(1 - m/2);
        # frozen against the finite-difference oracle (0.84852814 at mu0 = 0.2)
        params = ModelParams(mu0=0.2, temperature=0.01)
        _, (rmin, corner) = G.curvature_extrema(params)
        assert rmin == pytest.approx(0.848528137423857, abs=1e-8)
        assert G.level_curvature_radius(corner[0], corner[1], 0.2) == pytest.approx(rmin, abs=1e-10)
        assert fd_curvature_radius(np.array([corner[0]]), 0.2)[0] == pytest.approx(rmin, rel=1e-4)

    def test_flat_face_limit(self):
        # mu0 -> gamma^-j on the outer shell boundary: curvature radius blows up
        params = ModelParams(mu0=1e-2 * (1 + 1e-12), temperature=0.01)
        (rmax, _), _ = G.curvature_extrema(params, j=2, sign=1)
        assert rmax > 1e10
        with pytest.raises(DegeneratePoint):
            G.curvature_extrema(ModelParams(mu0=1e-2, temperature=0.01), j=2, sign=1)

    @pytest.mark.parametrize("mu0", [0.1, 0.01])
    def test_monotone_in_kplus_at_fixed_kminus(self, mu0):
        m = mu0
        corner_km = 2 * math.acos(math.sqrt(m / 2))
        face_km = 2 * math.acos(m / 2)
        for km_fixed in np.linspace(corner_km, face_km * 0.9995, 5):
            kp = np.linspace(0.0, corner_km, 1000)
            R = G.level_curvature_radius(kp, np.full_like(kp, km_fixed), m)
            assert np.all(np.diff(R) <= 1e-10)

    def test_degenerate_point(self):
        with pytest.raises(DegeneratePoint):
            G.level_curvature_radius(0.0, 0.0, 0.2)


class TestProjection:
    def test_idempotent(self):
        params = ModelParams(mu0=0.2, temperature=0.01)
        fp = G.project_to_fs(0.3, 2.5, params)
        assert abs(band_energy(fp.kplus, fp.kminus, params)) < 1e-12
        again = G.project_to_fs(fp.kplus, fp.kminus, params)
        assert math.hypot(again.kplus - fp.kplus, again.kminus - fp.kminus) < 1e-12

    def test_normal_perturbation_recovery(self):
        params = ModelParams(mu0=0.2, temperature=0.01)
        fp = G.project_to_fs(0.7, 2.4, params)
        moved = G.project_to_fs(fp.kplus + 0.01 * fp.normal[0],
                                fp.kminus + 0.01 * fp.normal[1], params)
        assert math.hypot(moved.kplus - fp.kplus, moved.kminus - fp.kminus) < 1e-6

    def test_against_dense_oracle(self):
        params = ModelParams(mu0=0.2, temperature=0.01)
        tree = dense_projection_oracle(0.2)
        rng = np.random.default_rng(2)
        kp = rng.uniform(-3.1, 3.1, 4000)
        km = rng.uniform(-3.1, 3.1, 4000)
        mask = np.abs(band_energy(kp, km, params)) < 0.9
        pp, pm, dist = G.project_batch(kp[mask], km[mask], params)
        d_oracle, _ = tree.query(np.column_stack([kp[mask], km[mask]]), workers=-1)
        assert np.max(np.abs(band_energy(pp, pm, params))) < 1e-12
        # never farther than the dense oracle, and within its resolution of it
        assert np.max(dist - d_oracle) < 1e-6

    def test_lipschitz_along_normal(self):
        # displacements below the shell width move the foot by less than themselves
        params = ModelParams(mu0=0.2, temperature=0.01)
        rng = np.random.default_rng(3)
        curve = G.fermi_surface(params)
        for _ in range(100):
            kp0 = rng.uniform(0.0, curve.k_corner)
            fp = G.surface_point(kp0, params)
            delta = G.shell_width(fp, 2, params)
            t = rng.uniform(-delta, delta)
            moved = G.project_to_fs(fp.kplus + t * fp.normal[0],
                                    fp.kminus + t * fp.normal[1], params)
            drift = math.hypot(moved.kplus - fp.kplus, moved.kminus - fp.kminus)
            assert drift <= abs(t) + 1e-9

    def test_diagonal_ambiguity(self):
        # deep inside the corner the two equidistant feet mirror across the
        # diagonal; the |kplus - kminus| tie-break cannot separate them
        params = ModelParams(mu0=0.2, temperature=0.01)
        with pytest.raises(AmbiguousProjection) as exc:
            G.project_to_fs(1.55, 1.55, params)
        assert len(exc.value.candidates) >= 2

    def test_outside_infrared_region_rejected(self):
        params = ModelParams(mu0=0.2, temperature=0.01)
        with pytest.raises(ConfigError):
            G.project_to_fs(0.0, 0.0, params)


class TestShellWidth:
    def test_face_center_ratio(self):
        params = ModelParams(mu0=0.01, temperature=1e-5)
        _, (rmin, corner) = G.curvature_extrema(params)
        (rmax, face), _ = G.curvature_extrema(params)
        ratio = G.shell_width(face, 3, params) / params.gamma ** -3
        assert 0.2475 <= ratio <= 10.0

    def test_scales_by_gamma_per_level(self):
        params = ModelParams(mu0=0.01, temperature=1e-6)
        _, (_, corner) = G.curvature_extrema(params)
        for j in (2, 3, 4):
            ratio = G.shell_width(corner, j, params) / G.shell_width(corner, j + 1, params)
            assert abs(ratio - params.gamma) / params.gamma < 0.2

    def test_corner_growth_as_mu0_shrinks(self):
        # log-log slope of the corner width against mu0 is -1/2
        widths = []
        mu0s = [1e-1, 1e-2, 1e-3]
        for mu0 in mu0s:
            params = ModelParams(mu0=mu0, temperature=1e-5)
            _, (_, corner) = G.curvature_extrema(params)
            widths.append(G.shell_width(corner, 3, params))
        slope = np.polyfit(np.log(mu0s), np.log(widths), 1)[0]
        assert abs(slope + 0.5) < 0.1

    def test_bracket_on_sampled_points(self):
        params = ModelParams(mu0=0.01, temperature=1e-5)
        curve = G.fermi_surface(params)
        for kp in np.linspace(0.0, curve.k_corner, 200):
            fp = G.surface_point(float(kp), params)
            ratio = G.shell_width(fp, 3, params) / params.gamma ** -3
            assert 0.2475 <= ratio <= 1.01 / math.sqrt(params.mu0)


class TestChordWidth:
    def test_arithmetic(self):
        assert G.chord_width(1.0, 0.04) == pytest.approx(0.2)

    def test_homogeneity(self):
        assert G.chord_width(4.0, 0.3) == pytest.approx(2.0 * G.chord_width(1.0, 0.3))

    def test_face_chord_bracket(self):
        # w = sqrt(R_max gamma^-j) stays within the stated band up to the
        # sloppy factor 2 of the source estimate
        params = ModelParams(mu0=0.01, temperature=1e-5)
        (rmax, _), _ = G.curvature_extrema(params)
        j = 4
        w = G.chord_width(rmax, params.gamma ** -j)
        lo = params.gamma ** (-j / 2.0)
        hi = params.gamma ** (-j / 2.0) / math.sqrt(params.mu0)
        assert 0.5 * lo <= w <= 2.5 * hi

    def test_validation(self):
        with pytest.raises(ConfigError):
            G.chord_width(-1.0, 0.1)


def test_surface_table_rows():
    params = ModelParams(mu0=0.1, temperature=0.01)
    rows = G.surface_table_rows(params, j=2, n=64)
    assert len(rows) == 64
    for kp, km, radius, width in rows:
        assert abs(band_energy(kp, km, params)) < 1e-9
        assert radius > 0 and width > 0
