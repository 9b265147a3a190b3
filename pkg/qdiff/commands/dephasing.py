import math

import numpy as np

from ..ensemble.dephasing import MIN_DEPHASING_TIMES, mc_dephasing, mc_pair_factor
from ..physics import theory
from ..physics.kernels import CorrelationKernel, WhiteNoiseKernel
from ..utils.errors import ConfigError
from ..utils.io import config_record, write_csv
from ..utils.logging import RunLogger

# Default largest lag, in dephasing times
DEFAULT_LAG_DEPHASING_TIMES = 10.0

def default_dt(kernel):
    """
    tau / 20, shortened so that phases advance by at most 0.05 rad per step on average,
    and so that tau stays a whole number of steps.
    """
    if(isinstance(kernel, WhiteNoiseKernel)):
        if(kernel.gamma == 0): raise ConfigError("--dt is needed when gamma = 0")
        return 0.05 / kernel.gamma
    bound = kernel.tau / 20.0
    if(kernel.W > 0): bound = min(bound, 0.05 / kernel.W)
    return kernel.tau / math.ceil(kernel.tau / bound - 1e-9)

def main(args):
    kernel = CorrelationKernel.from_args(args)
    logger = RunLogger.from_args(args)

    dt = args.dt if(args.dt is not None) else default_dt(kernel)
    t_max = args.tmax
    if(t_max is None):
        if(kernel.is_null()): raise ConfigError("--tmax is needed when the noise vanishes")
        t_max = DEFAULT_LAG_DEPHASING_TIMES * theory.dephasing_time(kernel)
    t_max = dt * math.ceil(t_max / dt - 1e-9)

    logger.log("sampling %i phase paths of %s, dt = %g, up to t = %g" % (args.samples, kernel, dt, t_max))
    estimate = mc_dephasing(kernel, dt, t_max, args.samples, args.seed)
    analytic = kernel.dephasing_correlation(estimate.times)

    args.out.mkdir(parents=True, exist_ok=True)
    record = config_record(args, dt=dt, tmax=t_max, kernel=kernel.describe())
    header = ['dt', 'C_phi_analytic', 'C_phi_mc_real', 'C_phi_mc_imag', 'stderr_real', 'stderr_imag']
    rows = zip(estimate.times, analytic, estimate.mean.real, estimate.mean.imag, estimate.stderr_real, estimate.stderr_imag)
    write_csv(args.out / 'dephasing.csv', header, rows, config=record)

    with np.errstate(divide='ignore', invalid='ignore'):
        z_real = np.abs(estimate.mean.real - analytic) / estimate.stderr_real
        z_imag = np.abs(estimate.mean.imag) / estimate.stderr_imag
    z_real, z_imag = z_real[1:], z_imag[1:] # No spread at lag 0
    print("max |mc - analytic| / stderr (real part): %.3g" % np.nanmax(z_real), flush=True)
    print("max |mc| / stderr (imaginary part): %.3g" % np.nanmax(z_imag), flush=True)

    if(args.pair_factor):
        q_theory = theory.pair_factor(kernel)
        q_t_max = t_max
        if(args.tmax is None): q_t_max = dt * math.ceil(MIN_DEPHASING_TIMES * theory.dephasing_time(kernel) / dt - 1e-9)
        q = mc_pair_factor(kernel, dt, q_t_max, args.samples, args.seed)
        write_csv(args.out / 'pair_factor.csv', ['Q_mc', 'stderr', 'Q_theory', 'n_pairs', 't_max'], [[q.Q, q.stderr, q_theory, q.n_pairs, q.t_max]], config=record)
        print("pair factor: Q_mc = %.6g +- %.2g, Q_theory = %.6g" % (q.Q, q.stderr, q_theory), flush=True)
