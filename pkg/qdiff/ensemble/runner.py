import dataclasses

import numpy as np
from joblib import Parallel, delayed

from ..simulation.dynamics import evolve, init_delta
from ..simulation.noise import NoiseStream
from ..utils.errors import ConfigError
from ..utils.logging import MinimalProgress
from ..utils.misc import site_offsets

@dataclasses.dataclass
class EnsembleStats:
    times: np.ndarray # Shape: (n_snapshots,)
    sigma_squared: np.ndarray # Shape: (n_snapshots,), computed from mean_profile
    mean_profile: np.ndarray = None # Shape: (n_snapshots, N)
    sigma_squared_stderr: np.ndarray = None
    second_moments: np.ndarray = None # Shape: (n_realizations, n_snapshots), <j^2> of each realization
    boundary_mass_max: np.ndarray = None # Maximum over realizations
    n_realizations: int = 0
    master_seed: int = None
    config: object = None
    truncated: bool = False
    truncation_time: float = None # Earliest boundary breach over the realizations

    def __len__(self):
        return len(self.times)

# Number of realizations averaged into one summary point
SUMMARY_PERIOD = 10

def _run_realization(config, master_seed, realization):
    noise = NoiseStream(config.kernel, config.n_sites, config.dt, max(1, config.n_steps), master_seed, realization)
    return evolve(config, noise, init_delta(config.n_sites))

def run_realizations(config, n_realizations, master_seed, workers=1):
    """
    Yields the trajectory of each realization, in realization order, whatever the number of workers.
    """
    if(workers == 1):
        return (_run_realization(config, master_seed, r) for r in range(n_realizations))
    parallel = Parallel(n_jobs=workers, return_as='generator')
    return parallel(delayed(_run_realization)(config, master_seed, r) for r in range(n_realizations))

def run_ensemble(config, n_realizations, master_seed, workers=1, on_realization=None, logger=None):
    """
    Evolves `n_realizations` noise realizations from a localized start and averages
    their probability profiles.
    Input:
        `on_realization`, optional callback (index, trajectory) called in realization order
        `logger`, optional RunLogger used for the progress display; the final second
            moment of each realization goes to its summary, averaged over SUMMARY_PERIOD realizations
    Output:
        EnsembleStats, a pure function of (config, n_realizations, master_seed).
        If any realization breached the boundary-mass limit, the statistics are cut
        to the time range valid for all realizations and flagged as truncated.
    """
    if(n_realizations < 1): raise ConfigError("at least one realization is needed (got %i)" % n_realizations)
    if(workers < 1): raise ConfigError("worker count must be positive (got %i)" % workers)

    snapshot_steps = config.snapshot_steps()
    n_snapshots = len(snapshot_steps)
    offsets = site_offsets(config.n_sites)

    profile_sum = np.zeros((n_snapshots, config.n_sites))
    second_moments = np.full((n_realizations, n_snapshots), np.nan)
    boundary_max = np.zeros(n_snapshots)
    n_valid = n_snapshots
    breach_times = []

    results = run_realizations(config, n_realizations, master_seed, workers)
    progress = logger.progress(n_realizations, desc="realizations") if(logger is not None) else MinimalProgress(n_realizations)
    with progress:
        for r, trajectory in enumerate(results):
            length = len(trajectory)
            profile_sum[:length] += trajectory.profiles
            second_moments[r, :length] = trajectory.profiles @ (offsets ** 2)
            boundary_max[:length] = np.maximum(boundary_max[:length], trajectory.boundary_mass)
            n_valid = min(n_valid, length)
            if(trajectory.truncated): breach_times.append(trajectory.breach_time)

            if(logger is not None): logger.scalar('realizations/final_second_moment', second_moments[r, length - 1], r, period=SUMMARY_PERIOD)
            if(on_realization is not None): on_realization(r, trajectory)
            progress.update()

    times = config.dt * np.array(snapshot_steps[:n_valid], dtype=float)
    mean_profile = profile_sum[:n_valid] / n_realizations
    mean_position = mean_profile @ offsets
    sigma_squared = mean_profile @ (offsets ** 2) - mean_position ** 2
    if(n_realizations > 1):
        stderr = second_moments[:, :n_valid].std(axis=0, ddof=1) / np.sqrt(n_realizations)
    else:
        stderr = np.full(n_valid, np.nan)

    return EnsembleStats(
        times=times,
        sigma_squared=sigma_squared,
        mean_profile=mean_profile,
        sigma_squared_stderr=stderr,
        second_moments=second_moments[:, :n_valid],
        boundary_mass_max=boundary_max[:n_valid],
        n_realizations=n_realizations,
        master_seed=master_seed,
        config=config,
        truncated=bool(breach_times),
        truncation_time=min(breach_times) if(breach_times) else None,
    )
