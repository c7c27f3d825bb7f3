"""Tests for the reduced piston channel: rates, closed forms, propagators."""

import math

import numpy as np
import pytest

from qpiston import baths, channel, dynamics
from qpiston import operators as ops
from qpiston.errors import ConfigError, PositivityError, ValidationError


def desk_params(N=24, g=0.05, height=1.0):
    hot = baths.BathSpectrum("H", 20.0, baths.Lorentzian(11.0, 0.2, height))
    cold = baths.BathSpectrum("C", 2.0, baths.FlatWindow(0.0, 9.0, height))
    return dynamics.EngineParams(omega0=10.0, nu=1.0, g=g, fock_dim=N, hot=hot, cold=cold)


class TestDriftDiffusion:
    def test_hand_assembled_coefficients(self):
        """Recompute gamma and D from raw samples and the balance point."""
        p = desk_params()
        p_g, p_e = dynamics.qubit_steady_state(p)
        two = (p.cold, p.hot)
        r2 = (p.g / p.nu) ** 2
        want_gamma = r2 * (
            (baths.combined(two, 11.0) - baths.combined(two, 9.0)) * p_e
            + (baths.combined(two, -9.0) - baths.combined(two, -11.0)) * p_g
        )
        want_d = r2 * (
            baths.combined(two, 9.0) * p_e + baths.combined(two, -11.0) * p_g
        )
        gamma, d = channel.drift_diffusion(p)
        np.testing.assert_allclose(gamma, want_gamma, rtol=1e-14)
        np.testing.assert_allclose(d, want_d, rtol=1e-14)

    def test_desk_spectra_sit_in_the_gain_regime(self):
        gamma, d = channel.drift_diffusion(desk_params())
        assert gamma < 0
        assert d > 0

    def test_derive_channel_doubles_unless_halved(self):
        p = desk_params()
        gamma, d = channel.drift_diffusion(p)
        full = channel.derive_channel(p, allow_negative_kappa=True)
        half = channel.derive_channel(
            p, halved_sidebands=True, allow_negative_kappa=True
        )
        np.testing.assert_allclose(full.gamma, 2 * gamma)
        np.testing.assert_allclose(full.diffusion, 2 * d)
        np.testing.assert_allclose(half.gamma, gamma)
        np.testing.assert_allclose(half.diffusion, d)


class TestPistonChannel:
    def test_rate_identification(self):
        ch = channel.PistonChannel(gamma=2e-3, diffusion=5e-4, nu=1.0)
        assert ch.kappa_up == 5e-4
        np.testing.assert_allclose(ch.kappa_down, 2.5e-3)

    def test_negative_kappa_needs_explicit_consent(self):
        with pytest.raises(ConfigError):
            channel.PistonChannel(gamma=-1.39e-4, diffusion=0.0, nu=1.0)
        ch = channel.PistonChannel(
            gamma=-1.39e-4, diffusion=0.0, nu=1.0, allow_negative_kappa=True
        )
        assert ch.kappa_down < 0

    def test_negative_diffusion_rejected(self):
        with pytest.raises(ConfigError):
            channel.PistonChannel(gamma=1e-3, diffusion=-1e-5, nu=1.0)


class TestClosedForms:
    def test_pure_gain_exponential(self):
        """gamma = -1.39e-4, D = 0: energy grows by e^{8.7336...} over 1e4 cycles."""
        ch = channel.PistonChannel(
            gamma=-1.39e-4, diffusion=0.0, nu=1.0, allow_negative_kappa=True
        )
        t = 2.0 * math.pi * 1e4
        want = math.exp(1.39e-4 * t)
        np.testing.assert_allclose(channel.mean_energy(ch, t, 1.0), want, rtol=1e-12)

    def test_zero_drift_is_linear_heating(self):
        ch = channel.PistonChannel(gamma=0.0, diffusion=2e-4, nu=1.0)
        np.testing.assert_allclose(channel.mean_occupation(ch, 500.0, 1.0), 1.1)

    def test_tiny_drift_branch_is_smooth(self):
        d = 3e-4
        tiny = channel.PistonChannel(gamma=1e-12, diffusion=d, nu=1.0)
        near = channel.PistonChannel(gamma=1e-7, diffusion=d, nu=1.0)
        t = 100.0
        a = channel.mean_occupation(tiny, t, 2.0)
        b = channel.mean_occupation(near, t, 2.0)
        np.testing.assert_allclose(a, b, rtol=1e-4)
        np.testing.assert_allclose(a, 2.0 + d * t, rtol=1e-6)

    def test_rk4_route_matches_closed_form(self):
        ch = channel.PistonChannel(
            gamma=-2e-4, diffusion=1e-4, nu=1.0, allow_negative_kappa=True
        )
        times = np.linspace(0.0, 2.0 * math.pi * 1e3, 40)
        want = channel.mean_occupation(ch, times, 4.0)
        coarse = channel.integrate_occupation(ch, 4.0, times)
        np.testing.assert_allclose(coarse, want, rtol=5e-8)
        fine = channel.integrate_occupation(ch, 4.0, times, dt=10.0)
        np.testing.assert_allclose(fine, want, rtol=1e-10)

    def test_amplitude_decay_rate_is_half(self):
        ch = channel.PistonChannel(gamma=4e-3, diffusion=1e-3, nu=1.0)
        a0 = 1.5 - 0.5j
        got = channel.coherent_amplitude(ch, 250.0, a0)
        np.testing.assert_allclose(got, a0 * math.exp(-0.5 * 4e-3 * 250.0))


class TestDensePropagation:
    def test_moments_follow_the_closed_forms(self):
        ch = channel.PistonChannel(gamma=2e-3, diffusion=1e-3, nu=1.0)
        N = 30
        rho = ops.coherent_state(1.2, N)
        t = 200.0
        out = channel.channel_propagate(rho, ch, t, dt=0.25)
        ops.require_density_matrix(out)
        a = ops.annihilation(out.shape[0])
        got_n = ops.expectation(out, a.conj().T @ a)
        got_a = np.trace(out @ a)
        np.testing.assert_allclose(got_n, channel.mean_occupation(ch, t, 1.44), atol=1e-6)
        np.testing.assert_allclose(
            got_a, channel.coherent_amplitude(ch, t, 1.2), atol=1e-6
        )

    def test_fock_evolution_matches_populations_route(self):
        ch = channel.PistonChannel(gamma=5e-3, diffusion=2e-3, nu=1.0)
        N = 25
        t = 120.0
        dense = channel.channel_propagate(ops.fock_state(3, N), ch, t, dt=0.2)
        pops = channel.propagate_populations(
            np.eye(N)[3].astype(float), ch, t, dt=0.2
        )
        d = min(dense.shape[0], pops.size)
        np.testing.assert_allclose(np.diag(dense).real[:d], pops[:d], atol=1e-8)
        off = dense - np.diag(np.diag(dense))
        assert np.max(np.abs(off)) < 1e-12

    def test_contracting_channel_reaches_thermal_fixed_point(self):
        # residual coherence falls off as e^{-gamma t/2}; t must outrun atol
        ch = channel.PistonChannel(gamma=1e-2, diffusion=4e-3, nu=1.0)
        out = channel.channel_propagate(ops.coherent_state(1.0, 30), ch, 3500.0, dt=1.0)
        want = channel.thermal_fixed_point_state(ch, out.shape[0])
        np.testing.assert_allclose(out, want, atol=1e-6)

    def test_gain_run_extends_the_ladder(self):
        ch = channel.PistonChannel(gamma=-2e-3, diffusion=2.1e-3, nu=1.0)
        rho = ops.coherent_state(2.0, 20)
        t = 500.0
        out = channel.channel_propagate(rho, ch, t, dt=0.2)
        assert out.shape[0] > 20
        a = ops.annihilation(out.shape[0])
        got_n = ops.expectation(out, a.conj().T @ a)
        np.testing.assert_allclose(
            got_n, channel.mean_occupation(ch, t, 4.0), rtol=1e-6
        )

    def test_drift_override_keeps_coherent_orbit_physical(self):
        """The gain override without diffusion transports coherent states."""
        ch = channel.PistonChannel(
            gamma=-1.39e-4, diffusion=0.0, nu=1.0, allow_negative_kappa=True
        )
        t = 2.0 * math.pi * 300.0
        out = channel.channel_propagate(ops.coherent_state(1.0, 20), ch, t, dt=2.0)
        ops.require_density_matrix(out)
        alpha_t = channel.coherent_amplitude(ch, t, 1.0)
        want = ops.coherent_state(alpha_t, out.shape[0])
        assert np.max(np.abs(out - want)) < 1e-6

    def test_fock_under_drift_override_aborts_on_positivity(self):
        """Pure drift without diffusion drives Fock populations negative."""
        ch = channel.PistonChannel(
            gamma=-1e-2, diffusion=0.0, nu=1.0, allow_negative_kappa=True
        )
        with pytest.raises(PositivityError):
            channel.propagate_populations(
                np.eye(20)[3].astype(float), ch, 200.0, dt=0.05
            )


class TestGaussianLane:
    def test_matches_dense_propagation(self):
        """Closed-form family flow against the dense integrator at N=80."""
        ch = channel.PistonChannel(gamma=3e-3, diffusion=2e-3, nu=1.0)
        N = 80
        gs0 = channel.GaussianPistonState(alpha=1.5, n_th=0.4)
        t = 150.0
        gs1 = channel.gaussian_propagate(gs0, ch, t)
        dense = channel.channel_propagate(gs0.materialize(N), ch, t, dt=0.25)
        want = gs1.materialize(dense.shape[0])
        assert np.max(np.abs(dense - want)) < 1e-5

    def test_semigroup_property(self):
        ch = channel.PistonChannel(
            gamma=-2e-4, diffusion=3e-4, nu=1.0, allow_negative_kappa=True
        )
        gs0 = channel.GaussianPistonState(alpha=2.0 + 1.0j, n_th=0.1)
        one = channel.gaussian_propagate(gs0, ch, 700.0)
        two = channel.gaussian_propagate(
            channel.gaussian_propagate(gs0, ch, 300.0), ch, 400.0
        )
        np.testing.assert_allclose(one.alpha, two.alpha, rtol=1e-12)
        np.testing.assert_allclose(one.n_th, two.n_th, rtol=1e-12)

    def test_family_identities(self):
        gs = channel.GaussianPistonState(alpha=2.0, n_th=0.5)
        nu = 1.3
        np.testing.assert_allclose(gs.energy(nu), nu * 4.5)
        np.testing.assert_allclose(gs.max_work(nu), nu * 4.0)
        np.testing.assert_allclose(
            gs.entropy(), 1.5 * math.log(1.5) - 0.5 * math.log(0.5)
        )
        np.testing.assert_allclose(gs.temperature(nu), nu / math.log(3.0))
        rho = gs.materialize(45)
        np.testing.assert_allclose(
            ops.von_neumann_entropy(rho), gs.entropy(), atol=1e-7
        )

    def test_fixed_point_requires_contraction(self):
        with pytest.raises(ValidationError):
            channel.thermal_fixed_point(
                channel.PistonChannel(
                    gamma=-1e-3, diffusion=1e-3, nu=1.0, allow_negative_kappa=True
                )
            )
