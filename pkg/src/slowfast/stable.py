"""Symmetric alpha-stable laws: exact sampling, density inversion, and constants.

The driver processes used throughout the toolkit are symmetric alpha-stable
with characteristic function exp(-c|xi|^alpha).  This module provides the
Chambers-Mallows-Stuck sampling transform (exact, no series truncation), the
normalisation constants tying the characteristic exponent to the jump
measure, and a Fourier-inversion routine for the density on a grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate
from scipy.special import gamma as _gamma, jv as _besselj


@dataclass(frozen=True)
class StableSpec:
    """Symmetric alpha-stable driver specification.

    Parameters
    ----------
    alpha : float
        Stability index, restricted to the open interval (1, 2).
    scale : float
        Nonnegative multiplier applied to the standard driver.
    dim : int
        State dimension (coordinates are independent).
    """

    alpha: float
    scale: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (1, 2), got {self.alpha}")
        if self.scale < 0.0:
            raise ValueError(f"scale must be nonnegative, got {self.scale}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")


@dataclass(frozen=True)
class StableConstants:
    """Normalisation constants of the standard symmetric alpha-stable law.

    ``c1`` multiplies |xi|^alpha in the characteristic exponent, ``c2``
    normalises the jump measure c2/|u|^(dim+alpha), and ``theta_frac`` is the
    (negative) multiplier turning the fractional Laplacian into the generator.
    """

    c1: float
    c2: float
    theta_frac: float


def _sphere_area(n: int) -> float:
    return 2.0 * np.pi ** (n / 2.0) / _gamma(n / 2.0)


def _theta_quadrature(alpha: float, dim: int, c2: float) -> float:
    """Integrate (cos(<e, u>) - 1) against the jump measure numerically.

    The unit vector e is taken along the first coordinate axis; by isotropy
    of the jump measure the value does not depend on this choice.
    """
    if dim == 1:
        head, _ = _integrate.quad(
            lambda u: (np.cos(u) - 1.0) * u ** (-1.0 - alpha), 0.0, 1.0, limit=200
        )
        osc, _ = _integrate.quad(
            lambda u: u ** (-1.0 - alpha), 1.0, np.inf, weight="cos", wvar=1.0
        )
        return 2.0 * c2 * (head + osc - 1.0 / alpha)

    # dim >= 2: angular integral of cos(r*w1) over the unit sphere reduces to
    # a Bessel function; the remaining radial integral is split at r = 1.
    area = _sphere_area(dim)
    nu = dim / 2.0 - 1.0

    def angular(r):
        return (2.0 * np.pi) ** (dim / 2.0) * r ** (-nu) * _besselj(nu, r)

    with warnings.catch_warnings():
        # roundoff warnings from the integrable r -> 0 singularity; accuracy
        # is cross-checked against the closed-form multiplier in the tests
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        head, _ = _integrate.quad(
            lambda r: (angular(r) - area) * r ** (-1.0 - alpha), 0.0, 1.0, limit=400
        )
        # oscillatory Bessel tail, integrated chunk-wise over half periods
        osc = 0.0
        edges = np.arange(1.0, 60.0 * np.pi, np.pi)
        for a, b in zip(edges[:-1], edges[1:]):
            piece, _ = _integrate.quad(
                lambda r: angular(r) * r ** (-1.0 - alpha), a, b, limit=100
            )
            osc += piece
    return c2 * (head + osc - area / alpha)


def stable_constants(alpha: float, dim: int = 1) -> StableConstants:
    """Characteristic-exponent and jump-measure constants for given alpha, dim.

    Returns C1 = pi^{-1/2} Gamma((1+alpha)/2) Gamma(n/2) / Gamma((n+alpha)/2),
    C2 = alpha Gamma((n+alpha)/2) / (2^{1-alpha} pi^{n/2} Gamma(1-alpha/2)),
    and the fractional-Laplacian multiplier obtained by numerical quadrature
    of the cosine integral against the jump measure (equal to -C1 up to
    quadrature error, which the test suite cross-checks).
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    if int(dim) != dim or dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim}")
    n = int(dim)
    c1 = (
        np.pi ** -0.5
        * _gamma((1.0 + alpha) / 2.0)
        * _gamma(n / 2.0)
        / _gamma((n + alpha) / 2.0)
    )
    c2 = (
        alpha
        * _gamma((n + alpha) / 2.0)
        / (2.0 ** (1.0 - alpha) * np.pi ** (n / 2.0) * _gamma(1.0 - alpha / 2.0))
    )
    theta = _theta_quadrature(alpha, n, c2)
    return StableConstants(c1=float(c1), c2=float(c2), theta_frac=float(theta))


def sample_standard_stable(alpha: float, u, e):
    """Chambers-Mallows-Stuck transform of a uniform and an exponential variate.

    Maps u ~ Uniform(-pi/2, pi/2) and e ~ Exponential(1) to a sample of the
    standard symmetric alpha-stable law with characteristic function
    exp(-|xi|^alpha).  The transform is deterministic, so it can be driven by
    caller-supplied variates and is safe under any parallel scheme.

    Parameters
    ----------
    alpha : float
        Stability index in (0, 2).
    u, e : float or ndarray
        Uniform variate strictly inside (-pi/2, pi/2) and positive
        unit-mean exponential variate; shapes must broadcast.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    u = np.asarray(u, dtype=float)
    e = np.asarray(e, dtype=float)
    if np.any(np.abs(u) >= np.pi / 2.0):
        raise ValueError("u must lie strictly inside (-pi/2, pi/2)")
    if np.any(e <= 0.0):
        raise ValueError("e must be positive")
    x = (
        np.sin(alpha * u)
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha)
    )
    if x.ndim == 0:
        return float(x)
    return x


def standard_stable(alpha: float, size, rng: np.random.Generator):
    """Draw standard symmetric alpha-stable samples from a caller-owned rng."""
    u = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size)
    e = rng.exponential(1.0, size)
    # guard against the measure-zero boundary draws of the generator
    u = np.clip(u, -np.pi / 2.0 + 1e-12, np.pi / 2.0 - 1e-12)
    e = np.maximum(e, 1e-300)
    return sample_standard_stable(alpha, u, e)


def empirical_cf(samples: np.ndarray, xi) -> np.ndarray:
    """Real part of the empirical characteristic function at frequencies xi.

    For symmetric samples the imaginary part vanishes in expectation, so the
    cosine mean is the natural estimator.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.array([np.mean(np.cos(x * samples)) for x in xi])
    return out if out.size > 1 else out


def stable_density(
    alpha: float,
    c: float,
    grid: np.ndarray,
    pad: int = 4,
    clip_negative: bool = True,
) -> np.ndarray:
    """Density with characteristic function exp(-c|xi|^alpha) on a uniform grid.

    Evaluates rho(x) = (1/2pi) int exp(i x xi) exp(-c|xi|^alpha) dxi by a
    discrete Fourier inversion.  The frequency grid is zero-padded by
    ``pad`` so the implied periodisation window is ``pad`` times wider than
    the requested grid; heavy tails need the extra frequency resolution.

    Parameters
    ----------
    alpha : float
        Stability index in (0, 2].
    c : float
        Positive coefficient of |xi|^alpha in the exponent.
    grid : ndarray
        Uniform 1-D grid, symmetric about 0, with an even number of points.
    pad : int
        Zero-padding factor for the inversion.
    clip_negative : bool
        Clip small negative inversion artifacts to 0 (default).  Disable to
        inspect the raw inversion output.

    Returns
    -------
    ndarray
        Density values on ``grid``; warns if the captured mass is < 0.999.
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if c <= 0.0:
        raise ValueError(f"exponent coefficient must be positive, got {c}")
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 4 or x.size % 2 != 0:
        raise ValueError("grid must be 1-D with an even number of points (>= 4)")
    dx = x[1] - x[0]
    if not np.allclose(np.diff(x), dx, rtol=1e-9, atol=1e-12):
        raise ValueError("grid must be uniform")
    if abs(x[0] + x[-1]) > 1e-9 * max(1.0, abs(x[-1])):
        raise ValueError("grid must be symmetric about 0")

    n = x.size
    m = int(pad) * n
    xi = 2.0 * np.pi * np.fft.fftfreq(m, d=dx)
    phi = np.exp(-c * np.abs(xi) ** alpha)
    # rho(x_j) = (dxi/2pi) * sum_k phi(xi_k) e^{i x_0 xi_k} e^{2pi i jk/m}
    vals = np.fft.ifft(phi * np.exp(1j * x[0] * xi)) / dx
    rho = np.real(vals[:n])

    mass = float(np.trapezoid(rho, x))
    if mass < 0.999:
        warnings.warn(
            f"grid captures only {mass:.4f} of the probability mass; widen it",
            RuntimeWarning,
        )
    if clip_negative:
        rho = np.maximum(rho, 0.0)
    return rho
