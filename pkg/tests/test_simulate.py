"""Tests for the slow-fast Euler-Maruyama integrator and the model catalog."""

import numpy as np
import pytest

from slowfast.errors import StabilityError
from slowfast.simulate import PathEnsemble, SlowFastSystem, catalog, integrate, register
from slowfast.stable import StableSpec


def _still_system(epsilon=1.0):
    return SlowFastSystem(
        f1=lambda x, y, th: np.zeros_like(x),
        g1=lambda x, y: np.zeros_like(x),
        f2=lambda x, y: np.zeros_like(y),
        g2=lambda x, y: np.zeros_like(y),
        slow_noise=StableSpec(1.5, 0.0),
        fast_noise=StableSpec(1.5, 0.0),
        epsilon=epsilon,
    )


def _linear_system(lam=1.0, sigma=0.0, epsilon=1.0, sensor=None, obs_scale=0.0):
    return SlowFastSystem(
        f1=lambda x, y, th: -lam * x,
        g1=lambda x, y: np.full_like(x, sigma),
        f2=lambda x, y: -y,
        g2=lambda x, y: np.zeros_like(y),
        slow_noise=StableSpec(1.5, 0.0),
        fast_noise=StableSpec(1.5, 0.0),
        epsilon=epsilon,
        sensor=sensor,
        obs_noise_scale=obs_scale,
    )


class TestIntegrate:
    def test_identity_dynamics(self):
        ens = integrate(_still_system(), None, 1.0, 0.0, dt=0.05, T=1.0, M=3, seed=0)
        np.testing.assert_array_equal(ens.slow, np.ones_like(ens.slow))

    def test_linear_decay_matches_ode(self):
        dt = 1e-3
        ens = integrate(_linear_system(), None, 1.0, 0.0, dt=dt, T=1.0, M=1, seed=0)
        assert ens.slow[0, -1, 0] == pytest.approx(np.exp(-1.0), abs=2 * dt)

    def test_example1_ensemble_shape(self):
        sys1 = catalog("example1", alpha=1.9, epsilon=0.01)
        ens = integrate(sys1, 9.0, 1.0, 0.0, dt=1e-3, T=0.1, M=1000, seed=1)
        assert ens.slow.shape == (1000, 101, 1)
        assert np.all(np.isfinite(ens.slow))

    def test_determinism(self):
        sys2 = catalog("example2", epsilon=0.05)
        a = integrate(sys2, None, 1.0, 0.5, dt=5e-3, T=0.5, M=7, seed=42, keep_fast=True)
        b = integrate(sys2, None, 1.0, 0.5, dt=5e-3, T=0.5, M=7, seed=42, keep_fast=True)
        np.testing.assert_array_equal(a.slow, b.slow)
        np.testing.assert_array_equal(a.fast, b.fast)
        np.testing.assert_array_equal(a.obs_increments, b.obs_increments)

    def test_path_independence(self):
        # disjoint path indices use non-overlapping streams: increments of
        # distinct paths must be uncorrelated
        sys_ou = _linear_system(sigma=1.0)
        ens = integrate(sys_ou, None, 0.0, 0.0, dt=1e-3, T=1.0, M=6, seed=3)
        incr = np.diff(ens.slow[:, :, 0], axis=1)
        n = incr.shape[1]
        for i in range(6):
            for j in range(i + 1, 6):
                a, b = incr[i], incr[j]
                corr = np.corrcoef(a, b)[0, 1]
                assert abs(corr) < 3.0 / np.sqrt(n)

    def test_ou_moments(self):
        # dx = -x dt + 0.5 dB: mean x0 e^{-t}, var 0.25(1 - e^{-2t})/2
        lam, sigma, T, dt, M = 1.0, 0.5, 1.0, 1e-3, 10_000
        ens = integrate(_linear_system(lam, sigma), None, 1.0, 0.0, dt, T, M, seed=5)
        x_T = ens.slow[:, -1, 0]
        mean_exact = np.exp(-lam * T)
        var_exact = sigma**2 * (1 - np.exp(-2 * lam * T)) / (2 * lam)
        se_mean = np.sqrt(var_exact / M)
        se_var = var_exact * np.sqrt(2.0 / M)
        assert abs(x_T.mean() - mean_exact) < 3 * se_mean
        assert abs(x_T.var() - var_exact) < 3 * se_var + 2 * dt * var_exact

    def test_stability_guard(self):
        sys1 = catalog("example1", epsilon=0.01)
        with pytest.raises(StabilityError):
            integrate(sys1, 9.0, 1.0, 0.0, dt=0.01, T=1.0, M=1, seed=0)

    def test_record_every_subsamples_and_accumulates_obs(self):
        sys2 = catalog("example2", epsilon=0.05)
        full = integrate(sys2, None, 1.0, 0.0, dt=5e-3, T=0.2, M=2, seed=9)
        sub = integrate(sys2, None, 1.0, 0.0, dt=5e-3, T=0.2, M=2, seed=9,
                        record_every=4)
        np.testing.assert_allclose(sub.times, full.times[::4])
        np.testing.assert_allclose(sub.slow, full.slow[:, ::4, :])
        # coarse observation increments are the sums of the fine ones
        coarse = full.obs_increments.reshape(2, -1, 4, 1).sum(axis=2)
        np.testing.assert_allclose(sub.obs_increments, coarse, atol=1e-12)

    def test_crn_across_epsilon(self):
        # same seed, different epsilon: identical underlying variates mean the
        # zero-noise slow parts coincide exactly
        for eps in (0.1, 0.01):
            sys1 = catalog("example1", epsilon=eps)
            ens = integrate(sys1, 9.0, 1.0, 0.0, dt=1e-3, T=0.05, M=2, seed=11,
                            keep_fast=True)
            assert np.all(np.isfinite(ens.fast))

    def test_gaussian_fast_channel_variance(self):
        # fast OU dY = -Y/eps dt + 2/sqrt(eps) dB has stationary variance 2
        sys2 = catalog("example2", epsilon=0.02)
        ens = integrate(sys2, None, 1.0, 0.0, dt=2e-3, T=2.0, M=64, seed=13,
                        keep_fast=True)
        tail = ens.fast[:, ens.fast.shape[1] // 2 :, 0]
        assert tail.mean() == pytest.approx(0.0, abs=0.1)
        assert tail.var() == pytest.approx(2.0, rel=0.1)


class TestCatalog:
    def test_example2_slow_drift_value(self):
        sys2 = catalog("example2")
        x = np.array([[2.0]])
        y = np.array([[1.0]])
        assert sys2.f1(x, y, None)[0, 0] == pytest.approx(-0.6, abs=1e-12)

    def test_example1_fast_drift_value(self):
        sys1 = catalog("example1")
        y = np.array([[3.0]])
        assert sys1.f2(np.array([[0.0]]), y)[0, 0] == pytest.approx(-3.0)

    def test_example1_slow_drift(self):
        sys1 = catalog("example1")
        x = np.array([[1.0]])
        y = np.array([[0.5]])
        expected = -1.0 + np.cos(9.0) * np.exp(-0.25)
        assert sys1.f1(x, y, 9.0)[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_example2_noise_spec(self):
        sys2 = catalog("example2", alpha=1.5)
        assert sys2.slow_noise.alpha == 1.5
        assert sys2.slow_noise.scale == pytest.approx(0.01 ** (1 / 1.5))
        assert sys2.obs_noise_scale == pytest.approx(np.sqrt(0.2))

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown model"):
            catalog("nope")

    def test_register(self):
        register("still", lambda alpha, eps: _still_system(epsilon=eps or 1.0))
        sys_r = catalog("still", epsilon=0.5)
        assert sys_r.epsilon == 0.5

    def test_example1_requires_theta(self):
        sys1 = catalog("example1")
        with pytest.raises(ValueError, match="theta"):
            sys1.f1(np.zeros((1, 1)), np.zeros((1, 1)), None)
