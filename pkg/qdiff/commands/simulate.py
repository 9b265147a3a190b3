import numpy as np

from ..ensemble.fitting import fit_diffusion
from ..ensemble.runner import run_ensemble
from ..physics import theory
from ..physics.kernels import CorrelationKernel
from ..simulation.dynamics import NOISE_BLOCK, SimConfig, free_lattice_profile
from ..simulation.noise import NoiseStream
from ..utils.errors import BoundaryBreachError, FitWindowError
from ..utils.io import config_record, write_csv
from ..utils.logging import RunLogger
from ..utils.misc import site_offsets

def profile_indices(n_snapshots, n_profiles):
    """
    Indices of `n_profiles` snapshots evenly spread from the first to the last one.
    """
    if(n_profiles <= 0 or n_snapshots == 0): return []
    return sorted(set(np.linspace(0, n_snapshots - 1, n_profiles).round().astype(int).tolist()))

def _write_profiles(out_dir, stats, n_profiles, T, ballistic, record):
    offsets = site_offsets(stats.config.n_sites)
    for i in profile_indices(len(stats), n_profiles):
        t = stats.times[i]
        header, columns = ['site_offset', 'probability'], [offsets, stats.mean_profile[i]]
        if(ballistic):
            header.append('bessel')
            columns.append(free_lattice_profile(stats.config.n_sites, T, t))
        write_csv(out_dir / ('profile_t%g.csv' % t), header, zip(*columns), config=record)

def _trajectory_dumper(out_dir, record):
    out_dir.mkdir(parents=True, exist_ok=True)
    def dump(index, trajectory):
        rows = zip(trajectory.times, trajectory.sigma_squared(), trajectory.boundary_mass)
        write_csv(out_dir / ('trajectory_%i.csv' % index), ['time', 'sigma_squared', 'boundary_mass'], rows, config=record)
    return dump

def _noise_rows(noise, dt):
    k = 0
    for block in noise.blocks(NOISE_BLOCK):
        for column in block.T:
            yield [k * dt] + list(column)
            k += 1

def _dump_noise(path, config, master_seed, record):
    noise = NoiseStream(config.kernel, config.n_sites, config.dt, max(1, config.n_steps), master_seed, 0)
    header = ['time'] + [('site_%i' % j) for j in site_offsets(config.n_sites)]
    write_csv(path, header, _noise_rows(noise, config.dt), config=record)

def main(args):
    kernel = CorrelationKernel.from_args(args)
    ballistic = kernel.is_null()
    params = theory.TheoryParams(tunneling_T=args.T, kernel=kernel)
    config = SimConfig.from_args(args, kernel)

    args.out.mkdir(parents=True, exist_ok=True)
    logger = RunLogger.from_args(args, summary_dir=(args.out / 'summary'))
    record = config_record(args, resolved=config.describe())
    logger.log("simulating %i realizations: %s" % (args.realizations, config.describe()))

    on_realization = _trajectory_dumper(args.out / 'trajectories', record) if(args.dump_trajectories) else None
    if(args.dump_noise): _dump_noise(args.out / 'noise.csv', config, args.seed, record)

    try:
        stats = run_ensemble(config, args.realizations, args.seed, workers=args.workers, on_realization=on_realization, logger=logger)

        rows = zip(stats.times, stats.sigma_squared, stats.sigma_squared_stderr, stats.boundary_mass_max)
        write_csv(args.out / 'sigma.csv', ['time', 'sigma_squared', 'stderr', 'boundary_mass_max'], rows, config=record)
        for step, sigma_squared in enumerate(stats.sigma_squared):
            logger.scalar('sigma_squared', sigma_squared, step)
        _write_profiles(args.out, stats, args.profiles, args.T, ballistic, record)

        if(ballistic):
            print("ballistic regime: the noise vanishes, sigma(t) grows as sqrt(2) T t and D is undefined", flush=True)
        try:
            estimate = fit_diffusion(stats)
        except FitWindowError:
            if(stats.truncated): estimate = None # Reported below as a boundary breach
            else: raise

        if(estimate is not None):
            fit = estimate.describe()
            write_csv(args.out / 'fit.csv', list(fit), [list(fit.values())], config=record)
            logger.scalar('D', estimate.D, 0)

            D_theory = None if(ballistic) else theory.predict_diffusion(params)
            print("D_numeric = %.6g +- %.2g (window [%g, %g], %i points, R^2 = %.6f, %s)" % (estimate.D, estimate.stderr, estimate.t_lo, estimate.t_hi, estimate.n_points, estimate.r_squared, estimate.quality.value), flush=True)
            if(D_theory is not None):
                print("D_theory = %.6g, ratio D_numeric / D_theory = %.4f" % (D_theory, estimate.D / D_theory), flush=True)
    finally:
        logger.close()

    if(stats.truncated):
        raise BoundaryBreachError("boundary mass exceeded %g at t = %g; outputs are truncated to t <= %g (increase --sites)" % (config.boundary_mass_limit, stats.truncation_time, stats.times[-1]), breach_time=stats.truncation_time)
