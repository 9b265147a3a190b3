"""
Time integration of the noisy tight-binding Schrodinger equation

    i dA_j/dt = T (A_{j+1} + A_{j-1}) + xi(j, t) A_j

on an open chain of N sites, for one noise realization.
"""

import dataclasses
import math

import numpy as np
from scipy import linalg, special

from ..physics.kernels import WhiteNoiseKernel
from ..physics import theory
from ..utils.errors import ConfigError, DomainError, NumericalBlowupError
from ..utils.misc import as_step_count, odd_lattice_size, site_offsets

# Relative slack when comparing dt with its upper bound (so that dt = tau/10 passes)
DT_SLACK = 1e-9
PROFILE_NORM_TOL = 1e-8

@dataclasses.dataclass
class LatticeState:
    amplitudes: np.ndarray # complex, shape (N,)
    time: float = 0.0

    @property
    def n_sites(self):
        return len(self.amplitudes)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def norm(self):
        return float(np.sum(self.probabilities()))

    def boundary_mass(self):
        return float(abs(self.amplitudes[0]) ** 2 + abs(self.amplitudes[-1]) ** 2)

def max_stable_dt(T, kernel):
    """
    Largest dt allowed by the accuracy heuristic dt <= min(tau/10, 0.1/W, 0.1/T).
    """
    bounds = [0.1 / T] if(T > 0) else [np.inf]
    if(isinstance(kernel, WhiteNoiseKernel)):
        # Phase spread per step sqrt(gamma dt) kept well below one radian
        if(kernel.gamma > 0): bounds.append(0.1 / kernel.gamma)
    else:
        bounds.append(kernel.tau / 10.0)
        if(kernel.W > 0): bounds.append(0.1 / kernel.W)
    return min(bounds)

def default_lattice_size(T, kernel, t_max):
    """
    Odd lattice size whose boundaries stay out of reach until t_max: 8 diffusive
    widths sqrt(2 D t_max) with D from theory, or past the ballistic front for W = 0.
    """
    if(kernel.is_null()):
        front = 2.0 * T * t_max
        return odd_lattice_size(front + 10.0 * front ** (1.0 / 3.0) + 10.0)
    D = 2.0 * T ** 2 * theory.pair_factor(kernel)
    return odd_lattice_size(8.0 * math.sqrt(2.0 * D * t_max))

@dataclasses.dataclass(frozen=True)
class SimConfig:
    tunneling_T: float
    kernel: object
    n_sites: int
    dt: float
    t_max: float
    snapshot_interval: float
    boundary_mass_limit: float = 1e-6
    override_dt: bool = False

    def __post_init__(self):
        if(not (self.tunneling_T >= 0)): raise ConfigError("tunneling T must be non-negative (got %s)" % self.tunneling_T)
        if(self.n_sites < 3): raise ConfigError("the lattice needs at least 3 sites (got %i)" % self.n_sites)
        if(self.n_sites % 2 == 0): raise ConfigError("the lattice needs an odd number of sites so that a center exists (got %i)" % self.n_sites)
        if(not (self.dt > 0)): raise ConfigError("dt must be positive (got %s)" % self.dt)
        if(not (self.t_max >= 0)): raise ConfigError("t_max must be non-negative (got %s)" % self.t_max)
        if(not (self.snapshot_interval > 0)): raise ConfigError("snapshot interval must be positive (got %s)" % self.snapshot_interval)
        if(not (0 < self.boundary_mass_limit < 1)): raise ConfigError("boundary mass limit must lie in (0, 1) (got %s)" % self.boundary_mass_limit)
        if(not self.override_dt and self.tunneling_T > 0):
            bound = max_stable_dt(self.tunneling_T, self.kernel)
            if(self.dt > bound * (1.0 + DT_SLACK)):
                raise ConfigError("dt = %g exceeds min(tau/10, 0.1/W, 0.1/T) = %g (use override_dt to force it)" % (self.dt, bound))

    @property
    def n_steps(self):
        return int(round(self.t_max / self.dt))

    @property
    def snapshot_every(self):
        """
        Number of steps between two snapshots.
        """
        return max(1, int(round(self.snapshot_interval / self.dt)))

    def snapshot_steps(self):
        steps = list(range(0, self.n_steps + 1, self.snapshot_every))
        if(steps[-1] != self.n_steps): steps.append(self.n_steps)
        return steps

    def describe(self):
        return {
            'T': self.tunneling_T, 'kernel': self.kernel.describe(), 'n_sites': self.n_sites,
            'dt': self.dt, 't_max': self.t_max, 'n_steps': self.n_steps,
            'snapshot_interval': self.snapshot_interval, 'boundary_mass_limit': self.boundary_mass_limit,
        }

    @classmethod
    def auto(cls, T, kernel, dt=None, t_max=None, n_sites=None, snapshot_interval=None, n_snapshots=200, **kwargs):
        """
        Fills the numerical parameters that are not given:
            `dt`: the largest step allowed by the heuristic, shortened so that tau is a
                whole number of steps
            `t_max`: at least 20 dephasing times, and long enough for sigma to pass 2 sites
                with room for a fit window
            `n_sites`: `default_lattice_size`
            `snapshot_interval`: t_max / n_snapshots, rounded to whole steps
        """
        if(not (T > 0) and (t_max is None or n_sites is None)):
            raise ConfigError("t_max and the lattice size must be given when T = %s" % T)
        if(dt is None):
            dt = max_stable_dt(T, kernel)
            if(not isinstance(kernel, WhiteNoiseKernel)):
                dt = kernel.tau / math.ceil(kernel.tau / dt - DT_SLACK)
        if(t_max is None):
            if(kernel.is_null()): t_max = 5.0 / T
            else:
                D = 2.0 * T ** 2 * theory.pair_factor(kernel)
                t_max = max(20.0 * theory.dephasing_time(kernel), 8.0 / D)
            t_max = dt * math.ceil(t_max / dt)
        elif(as_step_count(t_max / dt) is None):
            t_max = dt * round(t_max / dt)
        if(n_sites is None): n_sites = default_lattice_size(T, kernel, t_max)
        if(snapshot_interval is None): snapshot_interval = dt * max(1, round(t_max / (n_snapshots * dt)))

        return cls(tunneling_T=T, kernel=kernel, n_sites=n_sites, dt=dt, t_max=t_max, snapshot_interval=snapshot_interval, **kwargs)

    @classmethod
    def from_args(cls, args, kernel):
        return cls.auto(
            args.T, kernel,
            dt=args.dt, t_max=args.tmax, n_sites=args.sites, snapshot_interval=args.snapshot_interval,
            boundary_mass_limit=args.boundary_mass_limit, override_dt=args.override_dt,
        )

def init_delta(n_sites):
    """
    Particle localized on the center site at t = 0.
    """
    if(n_sites < 3): raise ConfigError("the lattice needs at least 3 sites (got %i)" % n_sites)
    if(n_sites % 2 == 0): raise ConfigError("the lattice needs an odd number of sites so that a center exists (got %i)" % n_sites)
    amplitudes = np.zeros(n_sites, dtype=complex)
    amplitudes[n_sites // 2] = 1.0
    return LatticeState(amplitudes=amplitudes, time=0.0)

class StrangIntegrator:
    """
    One step = half-step on-site phase, hopping step, half-step on-site phase.
    The hopping step applies the Cayley form (1 + i dt H/2)^{-1} (1 - i dt H/2)
    of exp(-i dt H), with H the tridiagonal hopping operator (open boundaries),
    which is exactly unitary.
    """
    def __init__(self, n_sites, dt, T):
        self.n_sites = n_sites
        self.dt = dt
        self.T = T

        c = 0.5j * dt * T
        self._c = c
        # Banded storage of (1 + i dt H/2): upper diagonal, main diagonal, lower diagonal
        ab = np.zeros((3, n_sites), dtype=complex)
        ab[0, 1:] = c
        ab[1, :] = 1.0
        ab[2, :-1] = c
        self._ab = ab

    def hop(self, amplitudes):
        if(self.T == 0): return amplitudes
        # (1 - i dt H/2) A
        rhs = amplitudes.copy()
        rhs[1:] -= self._c * amplitudes[:-1]
        rhs[:-1] -= self._c * amplitudes[1:]
        return linalg.solve_banded((1, 1), self._ab, rhs, check_finite=False)

    def step(self, amplitudes, noise_column):
        half_phase = np.exp(-0.5j * self.dt * noise_column)
        out = half_phase * self.hop(half_phase * amplitudes)
        if(not np.all(np.isfinite(out))):
            raise NumericalBlowupError("non-finite amplitudes after a step (dt = %g)" % self.dt)
        return out

def step(state, noise_column, dt, T, integrator=None):
    """
    Advances `state` by one step of length dt under the on-site energies `noise_column`.
    """
    noise_column = np.asarray(noise_column, dtype=float)
    if(noise_column.shape != (state.n_sites,)):
        raise ConfigError("noise column has shape %s, expected (%i,)" % (noise_column.shape, state.n_sites))
    if(integrator is None): integrator = StrangIntegrator(state.n_sites, dt, T)
    return LatticeState(amplitudes=integrator.step(state.amplitudes, noise_column), time=state.time + dt)

@dataclasses.dataclass
class Trajectory:
    times: np.ndarray # Shape: (n_snapshots,)
    profiles: np.ndarray # Shape: (n_snapshots, N)
    boundary_mass: np.ndarray # Shape: (n_snapshots,)
    truncated: bool = False
    breach_time: float = None # First time the boundary mass exceeded the limit

    def __len__(self):
        return len(self.times)

    def sigma_squared(self):
        offsets = site_offsets(self.profiles.shape[1])
        mean = self.profiles @ offsets
        return self.profiles @ (offsets ** 2) - mean ** 2

# Number of steps of noise drawn and exponentiated at once
NOISE_BLOCK = 4096

def evolve(config, noise, state):
    """
    Evolves `state` through config.n_steps steps, recording the probability profile
    every snapshot_interval. Stops early (truncated trajectory) as soon as the
    boundary mass exceeds config.boundary_mass_limit; later snapshots would not
    describe an infinite lattice.
    Input:
        `noise`, a NoisePath or a NoiseStream; either is read NOISE_BLOCK steps at a time
    """
    n_steps = config.n_steps
    if(not math.isclose(noise.dt, config.dt, rel_tol=1e-12)):
        raise ConfigError("noise dt (%g) differs from simulation dt (%g)" % (noise.dt, config.dt))
    if(noise.n_steps < n_steps):
        raise ConfigError("noise path covers %i steps, %i needed" % (noise.n_steps, n_steps))
    if(noise.n_sites != state.n_sites):
        raise ConfigError("noise path has %i sites, lattice has %i" % (noise.n_sites, state.n_sites))

    integrator = StrangIntegrator(state.n_sites, config.dt, config.tunneling_T)
    snapshot_steps = set(config.snapshot_steps())
    limit = config.boundary_mass_limit

    times, profiles, boundary = [], [], []
    def record(k, amplitudes):
        times.append(state.time + k * config.dt)
        profiles.append(np.abs(amplitudes) ** 2)
        boundary.append(abs(amplitudes[0]) ** 2 + abs(amplitudes[-1]) ** 2)

    amplitudes = state.amplitudes
    record(0, amplitudes)
    k = 0
    for block in noise.blocks(NOISE_BLOCK, n_steps):
        for half_phase in np.exp(-0.5j * config.dt * block).T:
            k += 1
            amplitudes = half_phase * integrator.hop(half_phase * amplitudes)
            edge_mass = abs(amplitudes[0]) ** 2 + abs(amplitudes[-1]) ** 2
            if(edge_mass > limit):
                return Trajectory(np.array(times), np.array(profiles), np.array(boundary), truncated=True, breach_time=state.time + k * config.dt)
            if(k in snapshot_steps):
                if(not np.all(np.isfinite(amplitudes))):
                    raise NumericalBlowupError("non-finite amplitudes at t = %g" % (state.time + k * config.dt))
                record(k, amplitudes)

    return Trajectory(np.array(times), np.array(profiles), np.array(boundary))

def profile_moments(profile):
    """
    Mean position and variance of a probability profile, positions measured as
    offsets from the center site.
    """
    profile = np.asarray(profile, dtype=float)
    if(np.any(profile < 0)):
        raise DomainError("probability profile has negative entries")
    deficit = 1.0 - profile.sum()
    if(abs(deficit) > PROFILE_NORM_TOL):
        raise DomainError("probability profile is not normalized (1 - sum = %.3g)" % deficit)
    offsets = site_offsets(len(profile))
    mean = float(profile @ offsets)
    return mean, float(profile @ (offsets ** 2)) - mean ** 2

def free_lattice_profile(n_sites, T, t):
    """
    |A_j(t)|^2 = J_j(2 T t)^2 for a particle started on the center site of an
    infinite noiseless lattice, evaluated on the offsets of an n_sites lattice.
    """
    return special.jv(site_offsets(n_sites), 2.0 * T * t) ** 2
