"""Tests for the alpha-stable sampling / density / constants layer."""

import numpy as np
import pytest
from scipy import integrate
from scipy.special import gamma

from slowfast.stable import (
    StableSpec,
    empirical_cf,
    sample_standard_stable,
    stable_constants,
    stable_density,
    standard_stable,
)


class TestStableSpec:
    def test_alpha_bounds(self):
        StableSpec(alpha=1.5, scale=1.0)
        with pytest.raises(ValueError):
            StableSpec(alpha=1.0, scale=1.0)
        with pytest.raises(ValueError):
            StableSpec(alpha=2.0, scale=1.0)

    def test_scale_nonnegative(self):
        StableSpec(alpha=1.5, scale=0.0)
        with pytest.raises(ValueError):
            StableSpec(alpha=1.5, scale=-0.1)


class TestConstants:
    def test_c1_is_one_in_dim_one(self):
        # Gamma(1/2) = sqrt(pi) makes the dim-1 prefactor collapse to 1;
        # cross-check with a direct Gamma-function evaluation.
        for alpha in [1.1, 1.5, 1.9]:
            direct = (
                np.pi**-0.5
                * gamma((1 + alpha) / 2)
                * gamma(0.5)
                / gamma((1 + alpha) / 2)
            )
            assert direct == pytest.approx(1.0, abs=1e-14)
            assert stable_constants(alpha, 1).c1 == pytest.approx(1.0, abs=1e-12)

    def test_c2_cauchy_value(self):
        # alpha = 1, dim = 1: jump density must match 1/(pi u^2).
        assert stable_constants(1.0, 1).c2 == pytest.approx(1.0 / np.pi, abs=1e-12)

    def test_positive(self):
        for alpha in [0.5, 1.3, 1.9]:
            for dim in [1, 2]:
                cst = stable_constants(alpha, dim)
                assert cst.c1 > 0
                assert cst.c2 > 0

    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.9])
    def test_theta_matches_characteristic_exponent_dim1(self, alpha):
        # The cosine integral against the jump measure evaluated at a unit
        # frequency is the characteristic exponent, i.e. -C1.
        cst = stable_constants(alpha, 1)
        assert cst.theta_frac == pytest.approx(-cst.c1, rel=1e-6)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_theta_higher_dim(self, dim):
        # The jump-measure constant is the fractional-Laplacian normalisation,
        # so the cosine integral equals -1 in every dimension (and -c1 only
        # coincides with it at dim 1, where c1 = 1).
        cst = stable_constants(1.5, dim)
        assert cst.theta_frac == pytest.approx(-1.0, rel=1e-4)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            stable_constants(2.5, 1)
        with pytest.raises(ValueError):
            stable_constants(-0.1, 1)


class TestSampler:
    def test_zero_at_u_zero(self):
        assert sample_standard_stable(1.5, 0.0, 1.0) == pytest.approx(0.0, abs=0.0)

    def test_odd_symmetry(self):
        rng = np.random.default_rng(7)
        u = rng.uniform(-np.pi / 2 + 1e-6, np.pi / 2 - 1e-6, 200)
        e = rng.exponential(1.0, 200)
        plus = sample_standard_stable(1.5, u, e)
        minus = sample_standard_stable(1.5, -u, e)
        np.testing.assert_allclose(minus, -plus, rtol=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            sample_standard_stable(1.5, np.pi / 2, 1.0)
        with pytest.raises(ValueError):
            sample_standard_stable(1.5, 0.3, 0.0)
        with pytest.raises(ValueError):
            sample_standard_stable(1.5, 0.3, -1.0)

    def test_empirical_cf_at_unit_frequency(self):
        rng = np.random.default_rng(11)
        samples = standard_stable(1.9, 100_000, rng)
        value = float(empirical_cf(samples, 1.0)[0])
        assert value == pytest.approx(np.exp(-1.0), abs=0.02)

    @pytest.mark.parametrize("alpha", [1.1, 1.3, 1.5, 1.7, 1.9])
    def test_empirical_cf_across_alpha(self, alpha):
        rng = np.random.default_rng(int(alpha * 100))
        samples = standard_stable(alpha, 100_000, rng)
        for xi in (0.5, 1.0, 2.0):
            target = np.exp(-abs(xi) ** alpha)
            assert float(empirical_cf(samples, xi)[0]) == pytest.approx(
                target, abs=0.02
            )

    def test_scaling_contract(self):
        # Multiplying samples by s turns the exponent into s^alpha |xi|^alpha.
        alpha, s = 1.5, 1.7
        rng = np.random.default_rng(23)
        samples = s * standard_stable(alpha, 100_000, rng)
        for xi in (0.5, 1.0):
            target = np.exp(-(s**alpha) * abs(xi) ** alpha)
            assert float(empirical_cf(samples, xi)[0]) == pytest.approx(
                target, abs=0.02
            )

    def test_gaussian_limit(self):
        # alpha -> 2 reduces the transform to 2 sin(u) sqrt(e), variance 2.
        rng = np.random.default_rng(3)
        u = rng.uniform(-np.pi / 2 + 1e-9, np.pi / 2 - 1e-9, 50_000)
        e = rng.exponential(1.0, 50_000)
        x = sample_standard_stable(1.999999, u, e)
        assert np.var(x) == pytest.approx(2.0, rel=0.05)


class TestDensity:
    def test_symmetry(self):
        grid = np.linspace(-60, 60, 1024)
        rho = stable_density(1.5, 1.0, grid)
        np.testing.assert_allclose(rho, rho[::-1], atol=1e-9)

    def test_mass_example(self):
        grid = np.linspace(-30, 30, 2048)
        rho = stable_density(1.9, 1.0 / 1.9, grid)
        mass = np.trapezoid(rho, grid)
        assert mass == pytest.approx(1.0, abs=1e-4)

    def test_value_at_zero_against_quadrature(self):
        # Independent 1-D oracle: rho(0) = (1/pi) int_0^inf exp(-xi^1.5) dxi.
        oracle, _ = integrate.quad(lambda t: np.exp(-(t**1.5)), 0, np.inf)
        oracle /= np.pi
        grid = np.linspace(-120, 120, 4096)
        rho = stable_density(1.5, 1.0, grid)
        at_zero = rho[np.argmin(np.abs(grid))]
        # 0 is not a node of the even grid; compare against the oracle at the
        # nearest node via local quadrature of the inversion integral.
        x_near = grid[np.argmin(np.abs(grid))]
        oracle_near = (
            integrate.quad(
                lambda t: np.cos(x_near * t) * np.exp(-(t**1.5)), 0, np.inf
            )[0]
            / np.pi
        )
        assert at_zero == pytest.approx(oracle_near, abs=1e-5)
        assert oracle_near == pytest.approx(oracle, abs=1e-3)

    def test_matches_quadrature_along_grid(self):
        grid = np.linspace(-25, 25, 1024)
        rho = stable_density(1.7, 0.8, grid)
        for x in (-3.2, 0.7, 4.9):
            oracle = (
                integrate.quad(
                    lambda t: np.cos(x * t) * np.exp(-0.8 * t**1.7),
                    0,
                    np.inf,
                    limit=200,
                )[0]
                / np.pi
            )
            at_x = rho[np.argmin(np.abs(grid - x))]
            x_node = grid[np.argmin(np.abs(grid - x))]
            oracle_node = (
                integrate.quad(
                    lambda t: np.cos(x_node * t) * np.exp(-0.8 * t**1.7),
                    0,
                    np.inf,
                    limit=200,
                )[0]
                / np.pi
            )
            assert at_x == pytest.approx(oracle_node, abs=1e-5)

    def test_raw_inversion_nearly_nonnegative_and_normalised(self):
        # grid widths chosen so the power-law tail mass drops below 1e-4
        cases = [
            (1.2, 1.0, np.linspace(-1500, 1500, 16384)),
            (1.5, 0.5, np.linspace(-200, 200, 4096)),
            (1.9, 1.0 / 1.9, np.linspace(-30, 30, 1024)),
        ]
        for alpha, c, grid in cases:
            raw = stable_density(alpha, c, grid, clip_negative=False)
            assert raw.min() >= -1e-8
            clipped = stable_density(alpha, c, grid)
            assert np.trapezoid(clipped, grid) == pytest.approx(1.0, abs=1e-4)

    def test_narrow_grid_warns(self):
        grid = np.linspace(-2, 2, 64)
        with pytest.warns(RuntimeWarning):
            stable_density(1.2, 1.0, grid)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            stable_density(1.5, 1.0, np.linspace(-10, 10, 101))  # odd count
        with pytest.raises(ValueError):
            stable_density(1.5, 1.0, np.linspace(0, 10, 100))  # not symmetric
        with pytest.raises(ValueError):
            stable_density(1.5, -1.0, np.linspace(-10, 10, 100))  # bad c
