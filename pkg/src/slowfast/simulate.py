"""Euler-Maruyama integration of coupled slow-fast systems and synthetic
observations.

The slow component carries an optional Brownian diffusion and an optional
symmetric alpha-stable driver; the fast component runs on the accelerated
clock t/epsilon with the scaling that keeps its invariant law independent of
epsilon.  Randomness is split per path through ``numpy.random.SeedSequence``
so disjoint path indices draw from non-overlapping streams and ensembles can
be generated concurrently or in blocks without changing the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from slowfast.errors import NumericsError, StabilityError
from slowfast.stable import StableSpec, sample_standard_stable

# block budget in doubles for pre-generated noise (keeps memory bounded)
_BLOCK_BUDGET = 8_000_000


@dataclass
class SlowFastSystem:
    """Coupled slow-fast signal plus observation channel.

    The maps are numpy-broadcasting callables: ``f1(x, y, theta)`` and
    ``g1(x, y)`` return arrays shaped like ``x``; ``f2(x, y)`` and
    ``g2(x, y)`` like ``y``.  Diffusion maps may alternatively return a
    square matrix per point (trailing ``(dim, dim)`` axes).  ``sensor`` maps
    slow states to observations; the optional ``fast_sensor`` is consumed
    only by the full-filter backend.
    """

    f1: Callable
    g1: Callable
    f2: Callable
    g2: Callable
    slow_noise: StableSpec
    fast_noise: StableSpec
    epsilon: float
    sensor: Optional[Callable] = None
    obs_noise_scale: float = 0.0
    fast_sensor: Optional[Callable] = None
    fast_obs_noise_scale: float = 0.0
    n: int = 1
    m: int = 1
    d: int = 1
    name: str = ""

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.obs_noise_scale < 0.0 or self.fast_obs_noise_scale < 0.0:
            raise ValueError("observation noise scales must be nonnegative")


@dataclass
class PathEnsemble:
    """Time grid plus M sampled trajectories and observation increments."""

    times: np.ndarray
    slow: np.ndarray  # (M, N+1, n)
    fast: Optional[np.ndarray] = None  # (M, N+1, m)
    obs_increments: Optional[np.ndarray] = None  # (M, N, d)
    seed: int = 0
    theta: object = None

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def n_paths(self) -> int:
        return self.slow.shape[0]


def _apply_diffusion(g_val, dw):
    """Apply a diffusion factor: elementwise (diagonal) or matrix-valued."""
    g_val = np.asarray(g_val, dtype=float)
    if g_val.ndim == dw.ndim + 1:
        return np.einsum("...ij,...j->...i", g_val, dw)
    return g_val * dw


def _broadcast_state(value, n_paths, dim, label):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full((n_paths, dim), float(arr))
    if arr.shape == (dim,):
        return np.tile(arr, (n_paths, 1))
    if arr.shape == (n_paths, dim):
        return arr.copy()
    raise ValueError(f"{label} must be scalar, ({dim},) or ({n_paths}, {dim})")


def integrate(
    system: SlowFastSystem,
    theta,
    x0,
    y0,
    dt: float,
    T: float,
    M: int = 1,
    seed: int = 0,
    record_every: int = 1,
    keep_fast: bool = False,
) -> PathEnsemble:
    """Explicit Euler-Maruyama integration of ``M`` independent paths.

    The slow step adds ``f1 dt + g1 sqrt(dt) xi + sigma1 dt^(1/alpha1) S``
    with ``S`` standard symmetric alpha-stable; the fast step runs the
    accelerated dynamics with coefficients ``f2/eps``, ``g2 sqrt(dt/eps)``
    and jump scaling ``(dt/eps)^(1/alpha2)``.  Observation increments are
    accumulated per recording interval as ``h(X) dt + r sqrt(dt) xi``.

    Output is deterministic given ``(seed, path index)``: each path draws
    from its own spawned stream, so block processing and parallel generation
    produce identical ensembles.

    Parameters
    ----------
    system : SlowFastSystem
    theta : parameter vector forwarded to ``f1`` (may be ``None``)
    x0, y0 : initial conditions, scalar or arrays of shape (n,)/(M, n)
    dt : simulation step; must satisfy ``dt <= epsilon / 10``
    T : horizon; ``T / dt`` must be a whole number of steps
    M : number of paths
    seed : base seed for the per-path stream derivation
    record_every : store the state every this many steps
    keep_fast : also record the fast component
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if T < dt:
        raise ValueError(f"horizon T={T} shorter than one step dt={dt}")
    if dt > system.epsilon / 10.0 + 1e-15:
        raise StabilityError(
            f"dt={dt} exceeds epsilon/10={system.epsilon / 10.0}; the explicit "
            "fast step is unstable"
        )
    n_steps = int(round(T / dt))
    if abs(n_steps * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T={T} is not an integer multiple of dt={dt}")
    if n_steps % record_every != 0:
        raise ValueError("record_every must divide the number of steps")

    n, m, d = system.n, system.m, system.d
    with_obs = system.sensor is not None
    n_rec = n_steps // record_every
    times = dt * record_every * np.arange(n_rec + 1)

    x_init = _broadcast_state(x0, M, n, "x0")
    y_init = _broadcast_state(y0, M, m, "y0")

    slow = np.empty((M, n_rec + 1, n))
    fast = np.empty((M, n_rec + 1, m)) if keep_fast else None
    obs = np.empty((M, n_rec, d)) if with_obs else None

    seeds = np.random.SeedSequence(seed).spawn(M)
    per_step = n_steps * (3 * n + 3 * m + (d if with_obs else 0))
    block = max(1, min(M, _BLOCK_BUDGET // max(per_step, 1)))

    a1, s1 = system.slow_noise.alpha, system.slow_noise.scale
    a2, s2 = system.fast_noise.alpha, system.fast_noise.scale
    sqrt_dt = np.sqrt(dt)
    sqrt_dte = np.sqrt(dt / system.epsilon)
    jump1 = s1 * dt ** (1.0 / a1)
    jump2 = s2 * (dt / system.epsilon) ** (1.0 / a2)

    for lo in range(0, M, block):
        hi = min(lo + block, M)
        b = hi - lo
        z1 = np.empty((b, n_steps, n))
        z2 = np.empty((b, n_steps, m))
        u1 = np.empty((b, n_steps, n))
        e1 = np.empty((b, n_steps, n))
        u2 = np.empty((b, n_steps, m))
        e2 = np.empty((b, n_steps, m))
        zo = np.empty((b, n_steps, d)) if with_obs else None
        for j in range(b):
            rng = np.random.default_rng(seeds[lo + j])
            z1[j] = rng.standard_normal((n_steps, n))
            z2[j] = rng.standard_normal((n_steps, m))
            u1[j] = rng.uniform(-np.pi / 2, np.pi / 2, (n_steps, n))
            e1[j] = rng.exponential(1.0, (n_steps, n))
            u2[j] = rng.uniform(-np.pi / 2, np.pi / 2, (n_steps, m))
            e2[j] = rng.exponential(1.0, (n_steps, m))
            if with_obs:
                zo[j] = rng.standard_normal((n_steps, d))

        S1 = jump1 * sample_standard_stable(a1, u1, e1) if jump1 > 0 else None
        S2 = jump2 * sample_standard_stable(a2, u2, e2) if jump2 > 0 else None

        X = x_init[lo:hi].copy()
        Y = y_init[lo:hi].copy()
        slow[lo:hi, 0] = X
        if keep_fast:
            fast[lo:hi, 0] = Y
        dz = np.zeros((b, d))
        rec = 0
        for k in range(n_steps):
            if with_obs:
                dz += np.broadcast_to(
                    np.asarray(system.sensor(X), dtype=float), (b, d)
                ) * dt + system.obs_noise_scale * sqrt_dt * zo[:, k]
            dX = np.broadcast_to(
                np.asarray(system.f1(X, Y, theta), dtype=float), X.shape
            ) * dt + _apply_diffusion(system.g1(X, Y), sqrt_dt * z1[:, k])
            if S1 is not None:
                dX = dX + S1[:, k]
            dY = np.broadcast_to(
                np.asarray(system.f2(X, Y), dtype=float), Y.shape
            ) * (dt / system.epsilon) + _apply_diffusion(
                system.g2(X, Y), sqrt_dte * z2[:, k]
            )
            if S2 is not None:
                dY = dY + S2[:, k]
            X = X + dX
            Y = Y + dY
            if (k + 1) % record_every == 0:
                rec += 1
                slow[lo:hi, rec] = X
                if keep_fast:
                    fast[lo:hi, rec] = Y
                if with_obs:
                    obs[lo:hi, rec - 1] = dz
                    dz = np.zeros((b, d))
            if (k + 1) % 64 == 0 and not (
                np.all(np.isfinite(X)) and np.all(np.isfinite(Y))
            ):
                raise NumericsError(f"state became non-finite at step {k + 1}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise NumericsError("state became non-finite at the final step")

    return PathEnsemble(
        times=times, slow=slow, fast=fast, obs_increments=obs, seed=seed, theta=theta
    )


# ---------------------------------------------------------------------------
# model catalog
# ---------------------------------------------------------------------------

_REGISTRY: dict = {}


def register(name: str, factory: Callable):
    """Register a user model factory ``factory(alpha, epsilon) -> SlowFastSystem``."""
    _REGISTRY[name] = factory


def _example1(alpha: float, epsilon: float) -> SlowFastSystem:
    # slow: dx = (-x + cos(theta x) exp(-y^2)) dt, no slow driver
    # fast: dy = -y/eps dt + eps^(-1/alpha) dL^alpha
    def f1(x, y, theta):
        if theta is None:
            raise ValueError("example1 drift requires a parameter theta")
        # cap the exponent so huge stable excursions do not overflow y*y
        return -x + np.cos(theta * x) * np.exp(-np.minimum(y * y, 745.0))

    return SlowFastSystem(
        f1=f1,
        g1=lambda x, y: np.zeros_like(x),
        f2=lambda x, y: -y,
        g2=lambda x, y: np.zeros_like(y),
        slow_noise=StableSpec(alpha=alpha, scale=0.0),
        fast_noise=StableSpec(alpha=alpha, scale=1.0),
        epsilon=epsilon,
        name="example1",
    )


def _example2(alpha: float, epsilon: float) -> SlowFastSystem:
    # slow: dX = 0.1 (X - X^3) Y^2 dt + 0.01^(1/alpha) dL^alpha
    # fast: dY = -Y/eps dt + 2/sqrt(eps) dB
    # observations: dZ1 = X dt + sqrt(0.2) dW1 (slow channel);
    # a fast channel dZ2 = Y dt + sqrt(0.2) dW2 is exposed for full filters.
    return SlowFastSystem(
        f1=lambda x, y, theta: 0.1 * (x - x**3) * y**2,
        g1=lambda x, y: np.zeros_like(x),
        f2=lambda x, y: -y,
        g2=lambda x, y: np.full_like(y, 2.0),
        slow_noise=StableSpec(alpha=alpha, scale=0.01 ** (1.0 / alpha)),
        fast_noise=StableSpec(alpha=alpha, scale=0.0),
        epsilon=epsilon,
        sensor=lambda x: x,
        obs_noise_scale=np.sqrt(0.2),
        fast_sensor=lambda y: y,
        fast_obs_noise_scale=np.sqrt(0.2),
        name="example2",
    )


def catalog(name: str, alpha: float = None, epsilon: float = 0.01) -> SlowFastSystem:
    """Build a shipped or registered model.

    ``example1``: deterministic slow dynamics driven by a stable-forced fast
    Ornstein-Uhlenbeck component (default alpha 1.9).  ``example2``: bistable
    slow drift modulated by the square of a Brownian-forced fast component,
    with a slow observation channel (default alpha 1.5).
    """
    if name == "example1":
        return _example1(1.9 if alpha is None else alpha, epsilon)
    if name == "example2":
        return _example2(1.5 if alpha is None else alpha, epsilon)
    if name in _REGISTRY:
        return _REGISTRY[name](alpha, epsilon)
    raise ValueError(f"unknown model {name!r}; choose example1, example2, "
                     "or register a factory first")
