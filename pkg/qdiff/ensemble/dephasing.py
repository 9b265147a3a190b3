"""
Monte Carlo estimates of the dephasing correlation C_phi(t) = <exp(-i phi(t))>,
phi(t) being the phase accumulated by one site from its noise, and of the pair
factor Q = integral of C_phi(t)^2.
"""

import dataclasses

import numpy as np
from scipy import integrate

from ..physics import theory
from ..simulation.noise import sample_noise_paths
from ..utils.errors import BallisticError, ConfigError
from ..utils.misc import as_step_count, warn

# Upper bound on the number of (path, step) values held in memory at once
CHUNK_VALUES = 2 ** 22
# The pair factor needs the dephasing curve up to this many dephasing times
MIN_DEPHASING_TIMES = 20.0

@dataclasses.dataclass(frozen=True)
class DephasingEstimate:
    times: np.ndarray # Shape: (n_steps + 1,), times[0] = 0
    mean: np.ndarray # complex, empirical C_phi at `times`
    stderr_real: np.ndarray
    stderr_imag: np.ndarray
    n_samples: int

    def rows(self):
        return list(zip(self.times, self.mean))

@dataclasses.dataclass(frozen=True)
class PairFactorEstimate:
    Q: float
    stderr: float
    n_pairs: int
    t_max: float

def _step_count(dt, t_max):
    if(not (dt > 0)): raise ConfigError("dt must be positive (got %s)" % dt)
    if(not (t_max > 0)): raise ConfigError("t_max must be positive (got %s)" % t_max)
    n_steps = as_step_count(t_max / dt, rel_tol=1e-6)
    if(n_steps is None): n_steps = int(np.ceil(t_max / dt))
    return n_steps

def _chunks(n_paths, n_steps, paths_per_unit=1):
    size = max(1, CHUNK_VALUES // (paths_per_unit * (n_steps + 1)))
    for start in range(0, n_paths, size):
        yield start, min(n_paths, start + size)

def _phases(kernel, dt, n_steps, n_paths, seed, site_offset):
    """
    phi(t_k) = sum over steps m < k of xi(t_m) dt, for `n_paths` independent paths.
    Output:
        array of shape (n_paths, n_steps + 1) whose first column is 0
    """
    path = sample_noise_paths(kernel, n_paths, dt, n_steps, seed, realization=0, site_offset=site_offset)
    phases = np.zeros((n_paths, n_steps + 1))
    np.cumsum(path.values, axis=1, out=phases[:, 1:])
    phases[:, 1:] *= dt
    return phases

def mc_dephasing(kernel, dt, t_max, n_samples, seed):
    """
    Averages exp(-i phi(t_k)) over `n_samples` independent noise paths, on the grid
    t_k = k dt, 0 <= t_k <= t_max.
    Output:
        DephasingEstimate; the value at t = 0 is exactly 1 with zero standard error.
    """
    if(n_samples < 2): raise ConfigError("at least two samples are needed for a standard error (got %i)" % n_samples)
    n_steps = _step_count(dt, t_max)

    sum_re, sum_im = np.zeros(n_steps + 1), np.zeros(n_steps + 1)
    sq_re, sq_im = np.zeros(n_steps + 1), np.zeros(n_steps + 1)
    for start, end in _chunks(n_samples, n_steps):
        phases = _phases(kernel, dt, n_steps, end - start, seed, site_offset=start)
        re, im = np.cos(phases), -np.sin(phases)
        sum_re += re.sum(axis=0)
        sum_im += im.sum(axis=0)
        sq_re += (re ** 2).sum(axis=0)
        sq_im += (im ** 2).sum(axis=0)

    n = n_samples
    mean_re, mean_im = sum_re / n, sum_im / n
    var_re = np.maximum(0.0, (sq_re - n * mean_re ** 2) / (n - 1))
    var_im = np.maximum(0.0, (sq_im - n * mean_im ** 2) / (n - 1))

    return DephasingEstimate(
        times=dt * np.arange(n_steps + 1),
        mean=mean_re + 1j * mean_im,
        stderr_real=np.sqrt(var_re / n),
        stderr_imag=np.sqrt(var_im / n),
        n_samples=n_samples,
    )

def mc_pair_factor(kernel, dt, t_max, n_samples, seed):
    """
    Estimates Q = integral over t >= 0 of C_phi(t)^2.
    Two independent sites a and b give Re <exp(-i (phi_a + phi_b))> = C_phi^2, so
    each of the `n_samples` site pairs yields one unbiased sample of the integrand
    curve. Each curve is integrated by the trapezoid rule up to t_max and completed
    by the exponential tail C_phi(t)^2 ~ C_phi(t_max)^2 exp(-2 I (t - t_max)),
    I being the integral of the kernel over t >= 0.
    Output:
        PairFactorEstimate (mean over pairs and its standard error)
    """
    if(kernel.is_null()): raise BallisticError()
    if(n_samples < 2): raise ConfigError("at least two samples are needed for a standard error (got %i)" % n_samples)
    tau_phi = theory.dephasing_time(kernel)
    if(t_max < MIN_DEPHASING_TIMES * tau_phi):
        warn("t_max = %g is shorter than %g dephasing times (%g); the pair factor may be biased by truncation" % (t_max, MIN_DEPHASING_TIMES, MIN_DEPHASING_TIMES * tau_phi))
    n_steps = _step_count(dt, t_max)
    times = dt * np.arange(n_steps + 1)
    tail_rate = 2.0 * kernel.integral()

    samples = np.empty(n_samples)
    for start, end in _chunks(n_samples, n_steps, paths_per_unit=2):
        # Pair i is made of the sites 2i and 2i + 1
        phases = _phases(kernel, dt, n_steps, 2 * (end - start), seed, site_offset=(2 * start))
        curves = np.cos(phases[0::2] + phases[1::2])
        samples[start:end] = integrate.trapezoid(curves, times, axis=1) + curves[:, -1] / tail_rate

    return PairFactorEstimate(
        Q=float(samples.mean()),
        stderr=float(samples.std(ddof=1) / np.sqrt(n_samples)),
        n_pairs=n_samples,
        t_max=float(times[-1]),
    )
