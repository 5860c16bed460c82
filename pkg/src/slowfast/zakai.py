"""Grid-based Zakai filter for reduced slow models, a particle-filter oracle
for full and reduced models, and the filter-comparison experiment.

The unnormalised filter density evolves by a prediction-correction splitting:
prediction solves the forward equation of the averaged generator (conservative
limited-upwind advection for the drift, a spectral step for the Brownian and
jump parts, which handles the fractional Laplacian exactly on the grid), and
correction multiplies by the discrete observation likelihood.  The particle
backend propagates samples with the same dynamics and reweights with the same
likelihood, giving an independent Monte Carlo route to the same quantities.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from slowfast.averaging import ReducedSystem, invariant_measure
from slowfast.errors import CFLError, DegeneracyError, NumericsError
from slowfast.simulate import SlowFastSystem, integrate
from slowfast.stable import sample_standard_stable

logger = logging.getLogger(__name__)

_EXP_CLIP = 700.0
_ADVECT_CFL = 0.45


# ---------------------------------------------------------------------------
# densities and particle clouds
# ---------------------------------------------------------------------------


@dataclass
class GridDensity:
    """Unnormalised filter density on a uniform 1-D grid."""

    x: np.ndarray
    values: np.ndarray
    time: float = 0.0
    normalized: bool = False

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.x.ndim != 1 or self.x.shape != self.values.shape:
            raise ValueError("grid and values must be matching 1-D arrays")
        if np.any(self.values < 0.0):
            raise ValueError("density values must be nonnegative")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def mass(self) -> float:
        return float(np.trapezoid(self.values, self.x))

    def normalize(self) -> "GridDensity":
        m = self.mass()
        if m <= 0.0:
            raise NumericsError("cannot normalise a zero-mass density")
        return GridDensity(self.x, self.values / m, self.time, normalized=True)

    def expectation(self, phi: Callable) -> float:
        """Integral of phi against the (normalised) density."""
        d = self.normalize() if not self.normalized else self
        return float(np.trapezoid(phi(d.x) * d.values, d.x))

    def mean(self) -> float:
        return self.expectation(lambda x: x)

    def var(self) -> float:
        m = self.mean()
        return self.expectation(lambda x: (x - m) ** 2)


def make_grid(xmin: float, xmax: float, nx: int) -> np.ndarray:
    if not (np.isfinite(xmin) and np.isfinite(xmax)) or xmax <= xmin:
        raise ValueError("grid bounds must satisfy xmin < xmax")
    if nx < 8:
        raise ValueError("grid needs at least 8 points")
    return np.linspace(xmin, xmax, int(nx))


def gaussian_density(grid: np.ndarray, mean: float, sd: float) -> GridDensity:
    grid = np.asarray(grid, dtype=float)
    vals = np.exp(-0.5 * ((grid - mean) / sd) ** 2)
    return GridDensity(grid, vals).normalize()


@dataclass
class ParticleCloud:
    """Weighted Monte Carlo representation of the filter."""

    positions: np.ndarray  # (K,) slow-only or (K, 2) joint (x, y)
    weights: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights < 0.0):
            raise ValueError("particle weights must be nonnegative")
        s = self.weights.sum()
        if abs(s - 1.0) > 1e-10:
            raise ValueError(f"particle weights must sum to 1, got {s}")

    @property
    def ess(self) -> float:
        return float(1.0 / np.sum(self.weights**2))

    @property
    def x(self) -> np.ndarray:
        return self.positions if self.positions.ndim == 1 else self.positions[:, 0]


def systematic_resampling(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Systematic resampling: one uniform offset, K evenly spaced pointers."""
    k = weights.size
    positions = (np.arange(k) + rng.uniform()) / k
    return np.searchsorted(np.cumsum(weights), positions).clip(0, k - 1)


# ---------------------------------------------------------------------------
# grid filter steps
# ---------------------------------------------------------------------------


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.where(a * b > 0.0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)
    return out


def _advect(v: np.ndarray, f_face: np.ndarray, h: float, dx: float,
            limiter: bool) -> np.ndarray:
    """One conservative upwind step of d(rho)/dt + d(f rho)/dx = 0, periodic."""
    vp = np.roll(v, -1)
    if limiter:
        slope = _minmod(v - np.roll(v, 1), vp - v)
    else:
        slope = np.zeros_like(v)
    v_left = v + 0.5 * slope  # reconstruction at face i+1/2 from the left
    v_right = vp - 0.5 * np.roll(slope, -1)  # and from the right
    flux = np.where(f_face >= 0.0, f_face * v_left, f_face * v_right)
    return v - (h / dx) * (flux - np.roll(flux, 1))


def _spectral_multiplier(model: ReducedSystem, x: np.ndarray, dt: float):
    """Fourier multiplier of the Brownian plus jump part of the generator."""
    probes = np.array([x[1], x[x.size // 2], x[-2]])
    g_vals = np.atleast_1d(np.asarray(model.gbar(probes), dtype=float))
    g_vals = np.broadcast_to(g_vals, probes.shape)
    if np.any(np.abs(g_vals - g_vals[0]) > 1e-9 * (1.0 + abs(g_vals[0]))):
        raise NumericsError(
            "grid backend requires an x-constant averaged diffusion; "
            "use the particle backend for state-dependent diffusions"
        )
    g_const = float(g_vals[0])
    scale, alpha = model.slow_noise.scale, model.slow_noise.alpha
    if g_const == 0.0 and scale == 0.0:
        return None
    dx = x[1] - x[0]
    xi = 2.0 * np.pi * np.fft.rfftfreq(x.size, d=dx)
    return np.exp(-(0.5 * g_const * xi**2 + scale**alpha * np.abs(xi) ** alpha) * dt)


def predict(
    density: GridDensity,
    model: ReducedSystem,
    dt: float,
    theta=None,
    limiter: bool = True,
) -> GridDensity:
    """One splitting step of the forward (Fokker-Planck type) equation.

    Advection by the averaged drift uses a conservative limited-upwind flux,
    substepped internally to a CFL number of {cfl}; the Brownian and
    alpha-stable parts are applied exactly in Fourier space.  Negative
    artifacts are clipped and the pre-step mass restored, so total mass is
    conserved and the output stays nonnegative.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    x, v = density.x, density.values
    dx = density.dx
    mass0 = density.mass()
    boundary = (v[0] + v[-1]) * dx
    if mass0 > 0 and boundary > 1e-6 * mass0:
        warnings.warn(
            f"density carries {boundary / mass0:.2e} relative mass at the grid "
            "boundary; widen the grid",
            RuntimeWarning,
        )

    faces = x + 0.5 * dx
    f_face = np.broadcast_to(
        np.asarray(model.fbar(faces, theta), dtype=float), faces.shape
    )
    vmax = float(np.max(np.abs(f_face)))
    if vmax * dt > dx:
        raise CFLError(
            f"advection CFL violated: max|f| dt = {vmax * dt:.3g} exceeds "
            f"dx = {dx:.3g}"
        )
    if vmax > 0.0:
        n_sub = max(1, int(np.ceil(vmax * dt / (_ADVECT_CFL * dx))))
        h = dt / n_sub
        for _ in range(n_sub):
            v = _advect(v, f_face, h, dx, limiter)

    mult = _spectral_multiplier(model, x, dt)
    if mult is not None:
        v = np.fft.irfft(np.fft.rfft(v) * mult, n=x.size)

    v = np.maximum(v, 0.0)
    m = float(np.trapezoid(v, x))
    if m <= 0.0:
        raise NumericsError("prediction step annihilated the density")
    v = v * (mass0 / m)
    return GridDensity(x, v, density.time + dt, normalized=density.normalized)


predict.__doc__ = predict.__doc__.format(cfl=_ADVECT_CFL)


def correct(density: GridDensity, sensor: Callable, dz, dt: float) -> GridDensity:
    """Multiply by the discrete unnormalised observation likelihood.

    The factor is exp(h(x)^T dz - |h(x)|^2 dt / 2) with the unit-noise
    convention; callers with observation noise of scale r pass h/r and dz/r.
    Exponents are clipped at +-700 to avoid overflow (with a logged warning).
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    h_vals = np.asarray(sensor(density.x), dtype=float)
    dz = np.asarray(dz, dtype=float)
    if h_vals.ndim == 1:
        expo = h_vals * float(dz) - 0.5 * h_vals**2 * dt
    else:
        expo = h_vals @ dz - 0.5 * np.sum(h_vals**2, axis=-1) * dt
    if np.any(np.abs(expo) > _EXP_CLIP):
        logger.warning(
            "likelihood exponent clipped at +-%g (max |exponent| = %.3g)",
            _EXP_CLIP,
            float(np.max(np.abs(expo))),
        )
        expo = np.clip(expo, -_EXP_CLIP, _EXP_CLIP)
    return GridDensity(
        density.x, density.values * np.exp(expo), density.time, normalized=False
    )


# ---------------------------------------------------------------------------
# filter runs
# ---------------------------------------------------------------------------


@dataclass
class FilterResult:
    """Normalised posterior summaries plus the unnormalised mass log."""

    times: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    log_mass: np.ndarray
    phi: dict
    densities: Optional[list] = None

    def unnormalized_phi(self, name: str) -> np.ndarray:
        """Unnormalised filter functional rho_t(phi) over time."""
        return np.exp(self.log_mass) * self.phi[name]


def _scaled_observation(model, obs):
    r = model.obs_noise_scale
    if r <= 0.0:
        raise ValueError("filtering requires a positive observation noise scale")
    if model.sensor is None:
        raise ValueError("model has no sensor; cannot assimilate observations")
    return (lambda xx: np.asarray(model.sensor(xx), dtype=float) / r), (
        None if obs is None else np.asarray(obs, dtype=float) / r
    )


def _likelihood_exponent(h_scaled, x_part, dz_scaled, dt):
    expo = h_scaled(x_part) * dz_scaled - 0.5 * h_scaled(x_part) ** 2 * dt
    if np.any(np.abs(expo) > _EXP_CLIP):
        logger.warning("particle likelihood exponent clipped at +-%g", _EXP_CLIP)
        expo = np.clip(expo, -_EXP_CLIP, _EXP_CLIP)
    return expo


def _cloud_histogram(cloud: ParticleCloud, grid: np.ndarray, smooth: float,
                     time: float) -> GridDensity:
    dx = grid[1] - grid[0]
    edges = np.concatenate([grid - dx / 2, [grid[-1] + dx / 2]])
    xs = np.clip(cloud.x, edges[0], edges[-1] - 1e-12)
    counts, _ = np.histogram(xs, bins=edges, weights=cloud.weights)
    vals = counts / dx
    if smooth > 0:
        half = int(np.ceil(4 * smooth))
        kern = np.exp(-0.5 * (np.arange(-half, half + 1) / smooth) ** 2)
        kern /= kern.sum()
        vals = np.convolve(vals, kern, mode="same")
    dens = GridDensity(grid, np.maximum(vals, 0.0), time)
    return dens.normalize()


def _propagate_full(system: SlowFastSystem, X, Y, theta, dt, n_sub, rng):
    """EM substeps of the joint (x, y) dynamics, vectorised over particles."""
    h = dt / n_sub
    k = X.size
    a1, s1 = system.slow_noise.alpha, system.slow_noise.scale
    a2, s2 = system.fast_noise.alpha, system.fast_noise.scale
    z1 = rng.standard_normal((n_sub, k))
    z2 = rng.standard_normal((n_sub, k))
    if s1 > 0:
        S1 = s1 * h ** (1.0 / a1) * _stable_draws(a1, (n_sub, k), rng)
    if s2 > 0:
        S2 = s2 * (h / system.epsilon) ** (1.0 / a2) * _stable_draws(a2, (n_sub, k), rng)
    for j in range(n_sub):
        fX = np.asarray(system.f1(X, Y, theta), dtype=float)
        gX = np.asarray(system.g1(X, Y), dtype=float)
        fY = np.asarray(system.f2(X, Y), dtype=float)
        gY = np.asarray(system.g2(X, Y), dtype=float)
        Xn = X + fX * h + gX * np.sqrt(h) * z1[j]
        if s1 > 0:
            Xn = Xn + S1[j]
        Yn = Y + fY * (h / system.epsilon) + gY * np.sqrt(
            h / system.epsilon
        ) * z2[j]
        if s2 > 0:
            Yn = Yn + S2[j]
        X, Y = Xn, Yn
    return X, Y


def _stable_draws(alpha, shape, rng):
    u = np.clip(rng.uniform(-np.pi / 2, np.pi / 2, shape), -np.pi / 2 + 1e-12,
                np.pi / 2 - 1e-12)
    e = np.maximum(rng.exponential(1.0, shape), 1e-300)
    return sample_standard_stable(alpha, u, e)


def _propagate_reduced(model: ReducedSystem, X, theta, dt, n_sub, rng, f_table):
    h = dt / n_sub
    k = X.size
    lattice, f_vals, g_vals = f_table
    a1, s1 = model.slow_noise.alpha, model.slow_noise.scale
    z = rng.standard_normal((n_sub, k))
    if s1 > 0:
        S = s1 * h ** (1.0 / a1) * _stable_draws(a1, (n_sub, k), rng)
    for j in range(n_sub):
        drift = np.interp(X, lattice, f_vals)
        diff = np.sqrt(np.maximum(np.interp(X, lattice, g_vals), 0.0) * h)
        X = X + drift * h + diff * z[j]
        if s1 > 0:
            X = X + S[j]
    return X


def run_filter(
    model,
    obs: Optional[np.ndarray],
    dt: float,
    init,
    backend: str = "grid",
    theta=None,
    rng: Optional[np.random.Generator] = None,
    n_steps: Optional[int] = None,
    sim_dt: Optional[float] = None,
    phis: Optional[dict] = None,
    record_densities: bool = False,
    hist_grid: Optional[np.ndarray] = None,
    hist_smooth: float = 1.0,
    obs_fast: Optional[np.ndarray] = None,
    limiter: bool = True,
) -> FilterResult:
    """Alternate prediction and correction along an observation record.

    Parameters
    ----------
    model : ReducedSystem (grid or particle backend) or SlowFastSystem
        (particle backend on the joint slow-fast state).
    obs : (N, d) array of observation increments, or None for a pure
        prediction run (then ``n_steps`` is required).
    dt : observation interval.
    init : GridDensity (grid backend) or ParticleCloud (particle backend).
    backend : "grid" or "particle".
    rng : generator driving particle propagation and resampling.
    sim_dt : particle propagation substep (defaults to dt, capped at
        epsilon/10 for slow-fast models).
    phis : named test functionals of the slow state recorded per step.
    record_densities : keep the full density (grid) or a smoothed weighted
        histogram on ``hist_grid`` (particle) at every step.
    obs_fast : optional fast-channel increments, consumed only by the
        particle backend on a full slow-fast model.
    """
    if obs is None and n_steps is None:
        raise ValueError("need observations or an explicit n_steps")
    n = n_steps if obs is None else np.asarray(obs).shape[0]
    if obs is not None:
        obs = np.asarray(obs, dtype=float).reshape(n, -1)
    phis = phis or {}
    times = dt * np.arange(n + 1)
    mean = np.empty(n + 1)
    var = np.empty(n + 1)
    log_mass = np.zeros(n + 1)
    phi_vals = {name: np.empty(n + 1) for name in phis}
    densities = [] if record_densities else None

    if backend == "grid":
        if not isinstance(model, ReducedSystem):
            raise TypeError("grid backend expects a ReducedSystem")
        if not isinstance(init, GridDensity):
            raise TypeError("grid backend expects a GridDensity initialiser")
        cur = init.normalize()
        if obs is not None:
            h_scaled, obs_scaled = _scaled_observation(model, obs)
        for name, phi in phis.items():
            phi_vals[name][0] = cur.expectation(phi)
        mean[0], var[0] = cur.mean(), cur.var()
        if record_densities:
            densities.append(cur)
        lm = 0.0
        for k in range(n):
            pred = predict(cur, model, dt, theta=theta, limiter=limiter)
            if obs is not None:
                corr = correct(pred, h_scaled, obs_scaled[k, 0], dt)
                factor = corr.mass()  # pred has unit mass
                if not np.isfinite(factor) or factor <= 0.0:
                    raise NumericsError("correction step produced zero mass")
                lm += np.log(factor)
                cur = corr.normalize()
            else:
                cur = pred.normalize()
            mean[k + 1], var[k + 1] = cur.mean(), cur.var()
            log_mass[k + 1] = lm
            for name, phi in phis.items():
                phi_vals[name][k + 1] = cur.expectation(phi)
            if record_densities:
                densities.append(cur)
        return FilterResult(times, mean, var, log_mass, phi_vals, densities)

    if backend != "particle":
        raise ValueError(f"unknown backend {backend!r}")
    if not isinstance(init, ParticleCloud):
        raise TypeError("particle backend expects a ParticleCloud initialiser")
    rng = rng or np.random.default_rng(0)

    joint = isinstance(model, SlowFastSystem)
    if joint:
        if init.positions.ndim != 2:
            raise ValueError("joint filtering needs (K, 2) particle positions")
        X = init.positions[:, 0].copy()
        Y = init.positions[:, 1].copy()
        cap = model.epsilon / 10.0
        step = min(sim_dt or cap, cap, dt)
        if obs_fast is not None and model.fast_sensor is None:
            raise ValueError("model exposes no fast sensor")
    else:
        if not isinstance(model, ReducedSystem):
            raise TypeError("particle backend expects a system or reduced model")
        X = init.positions.copy()
        Y = None
        step = min(sim_dt or dt, dt)
        lo = hist_grid[0] if hist_grid is not None else float(X.min()) - 5.0
        hi = hist_grid[-1] if hist_grid is not None else float(X.max()) + 5.0
        span = hi - lo
        lattice = np.linspace(lo - 0.5 * span, hi + 0.5 * span, 2048)
        f_table = (
            lattice,
            np.asarray(model.fbar(lattice, theta), dtype=float),
            np.broadcast_to(
                np.asarray(model.gbar(lattice), dtype=float), lattice.shape
            ).copy(),
        )
    n_sub = max(1, int(np.ceil(dt / step - 1e-12)))

    w = init.weights.copy()
    if obs is not None:
        h_scaled, obs_scaled = _scaled_observation(model, obs)
    if obs_fast is not None:
        r2 = model.fast_obs_noise_scale
        if r2 <= 0.0:
            raise ValueError("fast channel requires a positive noise scale")
        h2_scaled = lambda yy: np.asarray(model.fast_sensor(yy), dtype=float) / r2
        obs2_scaled = np.asarray(obs_fast, dtype=float).reshape(n, -1) / r2

    def summarise(k):
        mean[k] = float(np.sum(w * X))
        var[k] = float(np.sum(w * (X - mean[k]) ** 2))
        for name, phi in phis.items():
            phi_vals[name][k] = float(np.sum(w * phi(X)))
        if record_densities:
            if hist_grid is None:
                raise ValueError("record_densities with particles needs hist_grid")
            densities.append(
                _cloud_histogram(ParticleCloud(X.copy(), w.copy()), hist_grid,
                                 hist_smooth, dt * k)
            )

    summarise(0)
    lm = 0.0
    for k in range(n):
        x_pre = X
        y_pre = Y
        if joint:
            X, Y = _propagate_full(model, X, Y, theta, dt, n_sub, rng)
        else:
            X = _propagate_reduced(model, X, theta, dt, n_sub, rng, f_table)
        if obs is not None:
            expo = _likelihood_exponent(h_scaled, x_pre, obs_scaled[k, 0], dt)
            if obs_fast is not None:
                expo = expo + _likelihood_exponent(
                    h2_scaled, y_pre, obs2_scaled[k, 0], dt
                )
            lik = np.exp(expo)
            w_un = w * lik
            factor = float(w_un.sum())
            if not np.isfinite(factor) or factor <= 0.0:
                raise DegeneracyError("all particle weights underflowed")
            w = w_un / factor
            lm += np.log(factor)
            if 1.0 / np.sum(w**2) < 0.5 * w.size:
                idx = systematic_resampling(w, rng)
                X = X[idx]
                if Y is not None:
                    Y = Y[idx]
                w = np.full(w.size, 1.0 / w.size)
        log_mass[k + 1] = lm
        summarise(k + 1)
    return FilterResult(times, mean, var, log_mass, phi_vals, densities)


# ---------------------------------------------------------------------------
# filter comparison experiment
# ---------------------------------------------------------------------------


def clipped_identity(bound: float = 2.0) -> Callable:
    """Bounded test functional: identity clipped to [-bound, bound]."""
    return lambda x: np.clip(x, -bound, bound)


def compare_filters(
    system: SlowFastSystem,
    epsilons,
    phi: Optional[Callable] = None,
    p: float = 1.3,
    trials: int = 100,
    theta=None,
    T: float = 0.5,
    dt_obs: float = 0.01,
    sim_dt: float = 1e-3,
    grid_spec=(-3.0, 3.0, 384),
    n_particles: int = 4000,
    seed: int = 0,
    x0: float = 1.0,
    init_sd: float = 0.1,
) -> np.ndarray:
    """Monte Carlo p-moment of the full-versus-reduced filter discrepancy.

    For every epsilon the full system is simulated and filtered with the
    joint particle backend while the reduced model is filtered on the grid,
    both driven by the same slow observations; the table of
    ``E |rho_T(phi) - rho_bar_T(phi)|^p`` is returned as rows
    ``(epsilon, moment)``.  Trials share seeds across epsilon values (common
    random numbers), which isolates the time-scale effect.
    """
    from slowfast.averaging import reduce as reduce_system

    alpha1 = system.slow_noise.alpha
    if not 1.0 < p < alpha1:
        raise ValueError(f"p must lie in (1, alpha1) = (1, {alpha1}), got {p}")
    if trials < 100:
        raise ValueError("the moment table needs at least 100 trials")
    phi = phi or clipped_identity()

    reduced = reduce_system(system)
    mu_fast = invariant_measure(system, x0, "analytic")
    grid = make_grid(*grid_spec)
    record_every = int(round(dt_obs / sim_dt))
    rows = []
    for eps in epsilons:
        sys_eps = replace(system, epsilon=eps)
        diffs = np.empty(trials)
        for t in range(trials):
            rng_init = np.random.default_rng(np.random.SeedSequence((seed, t, 0)))
            y0 = float(mu_fast.draw(1, rng_init)[0])
            ens = integrate(
                sys_eps, theta, x0, y0, dt=sim_dt, T=T, M=1,
                seed=int(np.random.SeedSequence((seed, t, 1)).generate_state(1)[0]),
                record_every=record_every,
            )
            obs = ens.obs_increments[0]

            x_init = x0 + init_sd * rng_init.standard_normal(n_particles)
            y_init = mu_fast.draw(n_particles, rng_init)
            cloud = ParticleCloud(
                np.column_stack([x_init, y_init]),
                np.full(n_particles, 1.0 / n_particles),
            )
            rng_filter = np.random.default_rng(np.random.SeedSequence((seed, t, 2)))
            full = run_filter(
                sys_eps, obs, dt_obs, cloud, backend="particle", theta=theta,
                rng=rng_filter, sim_dt=sim_dt, phis={"phi": phi},
            )
            red = run_filter(
                reduced, obs, dt_obs, gaussian_density(grid, x0, init_sd),
                backend="grid", theta=theta, phis={"phi": phi},
            )
            diffs[t] = abs(
                full.unnormalized_phi("phi")[-1] - red.unnormalized_phi("phi")[-1]
            )
        rows.append((float(eps), float(np.mean(diffs**p))))
    return np.asarray(rows)
