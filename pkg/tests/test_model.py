import math

import numpy as np
import pytest

from fermirg.errors import ConfigError, PoleError
from fermirg.model import (
    ModelParams, Momentum, band_energy, band_energy_original, free_propagator,
    matsubara_frequencies, rotate_momentum, unrotate_momentum,
)


@pytest.fixture
def params():
    return ModelParams(mu0=0.01, temperature=0.01)


class TestModelParams:
    def test_defaults_and_derived(self):
        p = ModelParams(mu0=1e-2, temperature=1e-2, gamma=10.0)
        assert p.j0 == 2
        assert p.mu == 2.0 - 1e-2
        # gamma**(jmax-1) <= 1/(sqrt(2) pi T) < gamma**jmax
        bound = 1.0 / (math.sqrt(2.0) * math.pi * p.temperature)
        assert p.gamma ** (p.jmax - 1) <= bound < p.gamma**p.jmax

    @pytest.mark.parametrize("mu0, j0", [(1e-1, 1), (1e-2, 2), (1e-3, 3)])
    def test_j0_floor(self, mu0, j0):
        assert ModelParams(mu0=mu0, temperature=0.01).j0 == j0

    @pytest.mark.parametrize("kwargs", [
        {"mu0": 0.0}, {"mu0": 1.5}, {"temperature": -1.0}, {"gamma": 9.0},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ConfigError):
            ModelParams(**kwargs)


class TestBandEnergy:
    def test_half_filled_diagonal_point(self, params):
        # original coordinates (pi/2, pi/2): both cosines vanish
        assert band_energy_original(np.pi / 2, np.pi / 2, params) == pytest.approx(params.mu0)

    def test_zone_center(self, params):
        assert band_energy_original(0.0, 0.0, params) == pytest.approx(params.mu0 - 2.0)

    def test_surface_point_on_axis(self, params):
        kplus = 2.0 * math.acos(params.mu0 / 2.0)
        assert band_energy(kplus, 0.0, params) == pytest.approx(0.0, abs=1e-15)

    def test_rotation_is_involution(self, params):
        rng = np.random.default_rng(7)
        k1 = rng.uniform(-np.pi, np.pi, 10_000)
        k2 = rng.uniform(-np.pi, np.pi, 10_000)
        kp, km = rotate_momentum(k1, k2)
        b1, b2 = unrotate_momentum(kp, km)
        assert np.max(np.abs(b1 - k1)) < 1e-14
        assert np.max(np.abs(b2 - k2)) < 1e-14

    def test_rotated_equals_original(self, params):
        rng = np.random.default_rng(8)
        k1 = rng.uniform(-np.pi, np.pi, 10_000)
        k2 = rng.uniform(-np.pi, np.pi, 10_000)
        kp, km = rotate_momentum(k1, k2)
        assert np.max(np.abs(band_energy(kp, km, params)
                             - band_energy_original(k1, k2, params))) < 1e-13


class TestMatsubara:
    def test_t_half(self):
        p = ModelParams(mu0=0.01, temperature=0.5)
        freqs = matsubara_frequencies(p, 1)
        assert freqs == pytest.approx([-np.pi / 2, np.pi / 2])

    def test_smallest_positive_is_pi_t(self):
        p = ModelParams(mu0=0.01, temperature=0.01)
        freqs = matsubara_frequencies(p, 1)
        assert freqs[freqs > 0][0] == pytest.approx(np.pi * 0.01)

    def test_negation_symmetric_and_nonzero(self):
        p = ModelParams(mu0=0.01, temperature=0.37)
        freqs = matsubara_frequencies(p, 17)
        assert np.allclose(np.sort(-freqs), freqs)
        assert np.all(freqs != 0.0)
        assert np.all(np.diff(freqs) > 0)

    def test_n_cut_validation(self):
        p = ModelParams(mu0=0.01, temperature=0.5)
        with pytest.raises(ConfigError):
            matsubara_frequencies(p, 0)


class TestFreePropagator:
    def test_on_surface_smallest_frequency(self, params):
        kplus = 2.0 * math.acos(params.mu0 / 2.0)
        k0 = np.pi * params.temperature
        val = free_propagator(Momentum(k0, kplus, 0.0), params)
        assert val == pytest.approx(-1j / k0)
        assert abs(val) == pytest.approx(1.0 / k0)

    def test_unit_point(self, params):
        # k0 = 1, e0 = 1: value 1/(i - 1) = (-1 - i)/2
        kplus = 2.0 * math.acos((params.mu0 - 1.0) / 2.0)
        val = free_propagator(Momentum(1.0, kplus, 0.0), params)
        assert val == pytest.approx((-1.0 - 1.0j) / 2.0)

    def test_conjugate_symmetry(self, params):
        rng = np.random.default_rng(5)
        for _ in range(50):
            kp, km = rng.uniform(-2.5, 2.5, 2)
            k0 = rng.uniform(0.05, 3.0)
            a = free_propagator(Momentum(-k0, kp, km), params)
            b = free_propagator(Momentum(k0, kp, km), params)
            assert a * np.conj(b) ** -1 == pytest.approx(1.0, abs=1e-14)

    def test_pole_error(self, params):
        kplus = 2.0 * math.acos(params.mu0 / 2.0)
        with pytest.raises(PoleError):
            free_propagator(Momentum(0.0, kplus, 0.0), params)
