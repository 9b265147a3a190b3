"""
Discrete-time Gaussian noise paths xi(j, t_k), independent across sites, whose
autocorrelation matches a correlation kernel. Values are held constant over each
step [t_k, t_k + dt).
"""

import collections
import dataclasses

import numpy as np
from scipy import signal

from ..physics.kernels import Shape
from ..utils.errors import ConfigError, DomainError, ResolutionError

# dt must resolve the correlation time: dt <= tau / MIN_STEPS_PER_TAU
MIN_STEPS_PER_TAU = 4
# Largest relative mismatch between M * dt and tau for the moving-average construction
MAX_WINDOW_MISMATCH = 0.05

SeedInfo = collections.namedtuple('SeedInfo', ['master_seed', 'realization', 'site_offset'])

def site_generator(master_seed, realization, site):
    """
    Random generator of one (realization, site) stream. Philox is counter-based:
    the high counter words hold (site, realization), so distinct streams never overlap.
    """
    bit_generator = np.random.Philox(key=int(master_seed), counter=[0, 0, int(site), int(realization)])
    return np.random.Generator(bit_generator)

@dataclasses.dataclass(frozen=True)
class NoisePath:
    dt: float
    values: np.ndarray # Shape: (n_sites, n_steps); values[j, k] = xi(j, t_k)
    kernel: object
    seed_info: SeedInfo

    @property
    def n_sites(self):
        return self.values.shape[0]

    @property
    def n_steps(self):
        return self.values.shape[1]

    @property
    def times(self):
        return self.dt * np.arange(self.n_steps)

    def blocks(self, block_size, n_steps=None):
        """
        Yields the first `n_steps` steps (by default, all of them) in blocks of at most `block_size` steps.
        """
        if(n_steps is None): n_steps = self.n_steps
        for start in range(0, n_steps, block_size):
            yield self.values[:, start:min(n_steps, start + block_size)]

def moving_average_window(tau, dt):
    """
    Window length M = round(tau / dt) of the moving-average construction of triangular noise.
    """
    M = int(round(tau / dt))
    if(M < MIN_STEPS_PER_TAU):
        raise ResolutionError("dt = %g does not resolve tau = %g (need dt <= tau/%i)" % (dt, tau, MIN_STEPS_PER_TAU))
    if(abs(M * dt - tau) / tau > MAX_WINDOW_MISMATCH):
        raise ResolutionError("tau = %g is not close to a whole number of steps dt = %g (M = %i)" % (tau, dt, M))
    return M

class TriangularSource:
    """
    xi_k = (W / sqrt(M)) * sum over m < M of eta_{k-m}; the last M - 1 white draws
    are carried from one block to the next (the first ones prime the window).
    """
    def __init__(self, rng, kernel, dt):
        self.rng = rng
        self.M = moving_average_window(kernel.tau, dt)
        self.scale = kernel.W / np.sqrt(self.M)
        self.window = rng.standard_normal(self.M - 1)

    def take(self, n):
        eta = np.concatenate((self.window, self.rng.standard_normal(n)))
        self.window = eta[n:]
        return self.scale * np.convolve(eta, np.ones(self.M), mode='valid')

class ExponentialSource:
    """
    First-order autoregression started from its stationary distribution N(0, W^2).
    The filter state is carried from one block to the next.
    """
    def __init__(self, rng, kernel, dt):
        if(dt > kernel.tau / MIN_STEPS_PER_TAU):
            raise ResolutionError("dt = %g does not resolve tau = %g (need dt <= tau/%i)" % (dt, kernel.tau, MIN_STEPS_PER_TAU))
        self.rng = rng
        self.W = kernel.W
        self.a = np.exp(-dt / kernel.tau)
        self.numerator = [kernel.W * np.sqrt(1.0 - self.a * self.a)]
        self.denominator = [1.0, -self.a]
        self.state = None

    def take(self, n):
        eta = self.rng.standard_normal(n)
        if(self.state is not None):
            values, self.state = signal.lfilter(self.numerator, self.denominator, eta, zi=self.state)
            return values
        first = self.W * eta[0]
        self.state = np.array([self.a * first])
        if(n == 1): return np.array([first])
        rest, self.state = signal.lfilter(self.numerator, self.denominator, eta[1:], zi=self.state)
        return np.concatenate(([first], rest))

class WhiteSource:
    def __init__(self, rng, kernel, dt):
        self.rng = rng
        # Variance gamma / dt makes the integrated phase over dt have variance gamma * dt
        self.scale = np.sqrt(kernel.gamma / dt)

    def take(self, n):
        return self.scale * self.rng.standard_normal(n)

_SITE_SOURCES = {
    Shape.TRIANGULAR: TriangularSource,
    Shape.EXPONENTIAL: ExponentialSource,
    Shape.WHITE: WhiteSource,
}

class NoiseStream:
    """
    Noise of `n_sites` independent sites produced block by block, each site keeping
    its generator and filter state between blocks, so that only one block is held
    in memory. The values of a site depend only on (master_seed, realization, site),
    not on how the steps are split into blocks.
    """
    def __init__(self, kernel, n_sites, dt, n_steps, master_seed, realization, site_offset=0):
        if(n_sites < 1 or n_steps < 1):
            raise ConfigError("noise paths need at least one site and one step (got %i sites, %i steps)" % (n_sites, n_steps))
        if(not (dt > 0)):
            raise ConfigError("noise time step must be positive (got %s)" % dt)
        source_cls = _SITE_SOURCES.get(kernel.shape)
        if(source_cls is None):
            raise DomainError("noise sampling is not supported for %s kernels" % kernel.shape.value)

        self.kernel = kernel
        self.dt = dt
        self.n_steps = n_steps
        self.seed_info = SeedInfo(master_seed, realization, site_offset)
        self._sources = [source_cls(site_generator(master_seed, realization, site_offset + j), kernel, dt) for j in range(n_sites)]
        self._position = 0

    @property
    def n_sites(self):
        return len(self._sources)

    @property
    def position(self):
        """
        Number of steps already produced.
        """
        return self._position

    def take(self, n):
        """
        The next `n` steps of every site, shape (n_sites, n).
        """
        if(n < 1 or self._position + n > self.n_steps):
            raise ConfigError("cannot take %i steps at step %i of a %i-step noise stream" % (n, self._position, self.n_steps))
        values = np.empty((self.n_sites, n), dtype=float)
        for j, source in enumerate(self._sources):
            values[j] = source.take(n)
        self._position += n
        return values

    def blocks(self, block_size, n_steps=None):
        """
        Yields the next `n_steps` steps (by default, all remaining ones) in blocks of at most `block_size` steps.
        """
        if(n_steps is None): n_steps = self.n_steps - self._position
        end = self._position + n_steps
        if(end > self.n_steps):
            raise ConfigError("noise stream covers %i steps, %i requested" % (self.n_steps, end))
        while(self._position < end):
            yield self.take(min(block_size, end - self._position))

def sample_noise_paths(kernel, n_sites, dt, n_steps, master_seed, realization, site_offset=0):
    """
    Samples xi(j, t_k) for sites j = 0..n_sites-1 and steps k = 0..n_steps-1.
    Input:
        `kernel`, target autocorrelation (triangular, exponential or white)
        `master_seed`, `realization`, identify the noise environment
        `site_offset`, index of the first site's stream
    Output:
        a NoisePath; a deterministic function of (master_seed, realization, site),
        equal to what a NoiseStream with the same arguments produces.
    """
    stream = NoiseStream(kernel, n_sites, dt, n_steps, master_seed, realization, site_offset)
    values = stream.take(n_steps)
    values.setflags(write=False)
    return NoisePath(dt=dt, values=values, kernel=kernel, seed_info=stream.seed_info)

def empirical_autocovariance(path, max_lag):
    """
    Autocovariance of the noise at lags 0..max_lag (in steps), normalized by
    n_steps (biased estimator) and averaged over sites.
    Output:
        (lag_times, values), two arrays of length max_lag + 1
    """
    n_steps = path.n_steps
    if(max_lag < 0 or max_lag >= n_steps / 10):
        raise ConfigError("max_lag = %i must be below n_steps / 10 = %g" % (max_lag, n_steps / 10))

    centered = path.values - path.values.mean(axis=1, keepdims=True)
    values = np.empty(max_lag + 1)
    for m in range(max_lag + 1):
        products = np.einsum('jk,jk->j', centered[:, :(n_steps - m)], centered[:, m:])
        values[m] = products.mean() / n_steps

    return path.dt * np.arange(max_lag + 1), values

def derive_seed(master_seed, *indices):
    """
    Independent 64-bit seed for the sub-experiment `indices` of a run seeded with `master_seed`.
    """
    sequence = np.random.SeedSequence([int(master_seed)] + [int(i) for i in indices])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
