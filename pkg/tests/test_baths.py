"""Tests for bath profiles, detailed-balance sampling and separation checks."""

import math

import numpy as np
import pytest

from qpiston import baths
from qpiston.errors import ConfigError


class TestProfiles:
    def test_flat_window_edges_inclusive(self):
        p = baths.FlatWindow(1.0, 3.0, 0.7)
        assert p.value(1.0) == 0.7
        assert p.value(3.0) == 0.7
        assert p.value(0.999) == 0.0
        assert p.value(3.001) == 0.0

    def test_lorentzian_peak_and_halfwidth(self):
        p = baths.Lorentzian(5.0, 0.4, 2.0)
        assert p.value(5.0) == 2.0
        np.testing.assert_allclose(p.value(5.4), 1.0)
        np.testing.assert_allclose(p.value(4.6), 1.0)

    def test_gaussian_one_sigma_point(self):
        p = baths.Gaussian(5.0, 0.4, 2.0)
        np.testing.assert_allclose(p.value(5.4), 2.0 * math.exp(-0.5))

    def test_invalid_profiles_rejected(self):
        with pytest.raises(ConfigError):
            baths.FlatWindow(3.0, 1.0, 1.0)
        with pytest.raises(ConfigError):
            baths.FlatWindow(0.0, 1.0, -1.0)
        with pytest.raises(ConfigError):
            baths.Lorentzian(1.0, 0.0, 1.0)
        with pytest.raises(ConfigError):
            baths.Gaussian(-1.0, 0.5, 1.0)


class TestSampling:
    def test_detailed_balance_identity(self):
        """G(omega) = exp(omega/T) G(-omega) across random profiles."""
        rng = np.random.default_rng(17)
        for _ in range(50):
            family = rng.integers(0, 3)
            if family == 0:
                lo = rng.uniform(0, 5)
                prof = baths.FlatWindow(lo, lo + rng.uniform(0.5, 5), rng.uniform(0.1, 3))
            elif family == 1:
                prof = baths.Lorentzian(
                    rng.uniform(0, 10), rng.uniform(0.1, 2), rng.uniform(0.1, 3)
                )
            else:
                prof = baths.Gaussian(
                    rng.uniform(0, 10), rng.uniform(0.1, 2), rng.uniform(0.1, 3)
                )
            bath = baths.BathSpectrum("x", rng.uniform(0.2, 30), prof)
            omega = rng.uniform(0.01, 12)
            lhs = baths.sample(bath, omega)
            rhs = math.exp(omega / bath.temperature) * baths.sample(bath, -omega)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-300)

    def test_zero_frequency_reads_profile(self):
        bath = baths.BathSpectrum("x", 2.0, baths.FlatWindow(0.0, 1.0, 0.9))
        assert baths.sample(bath, 0.0) == 0.9

    def test_combined_is_additive(self):
        hot = baths.BathSpectrum("H", 20.0, baths.Lorentzian(11.0, 0.2, 1.0))
        cold = baths.BathSpectrum("C", 2.0, baths.FlatWindow(0.0, 9.0, 1.0))
        for omega in (-11.0, -3.0, 5.0, 9.0, 11.0):
            want = baths.sample(hot, omega) + baths.sample(cold, omega)
            np.testing.assert_allclose(baths.combined([hot, cold], omega), want)

    def test_negative_temperature_rejected(self):
        with pytest.raises(ConfigError):
            baths.BathSpectrum("x", 0.0, baths.FlatWindow(0.0, 1.0, 1.0))


class TestSeparationReport:
    def hot(self):
        return baths.BathSpectrum("H", 20.0, baths.Lorentzian(11.0, 0.2, 1.0))

    def cold(self):
        return baths.BathSpectrum("C", 2.0, baths.FlatWindow(0.0, 9.0, 1.0))

    def test_disjoint_baths_are_favorable(self):
        rep = baths.spectral_separation_report(self.hot(), self.cold(), 10.0, 1.0)
        assert rep.gain_favorable
        assert rep.upper_dominance == math.inf
        np.testing.assert_allclose(rep.lower_dominance, 101.0)
        np.testing.assert_allclose(rep.hot_at_lower, 1.0 / 101.0)
        assert rep.cold_at_upper == 0.0

    def test_overlapping_baths_flagged(self):
        hot = baths.BathSpectrum("H", 20.0, baths.Gaussian(10.0, 4.0, 1.0))
        cold = baths.BathSpectrum("C", 2.0, baths.Gaussian(10.0, 4.0, 1.0))
        rep = baths.spectral_separation_report(hot, cold, 10.0, 1.0)
        assert not rep.gain_favorable

    def test_nu_bounds_enforced(self):
        with pytest.raises(ConfigError):
            baths.spectral_separation_report(self.hot(), self.cold(), 10.0, 10.0)
        with pytest.raises(ConfigError):
            baths.spectral_separation_report(self.hot(), self.cold(), 10.0, -1.0)
