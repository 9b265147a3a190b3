import dataclasses
import itertools

import numpy as np

from .fitting import fit_diffusion, loglog_slope
from .runner import run_ensemble
from ..physics import theory
from ..physics.kernels import Shape, build_kernel
from ..simulation.dynamics import SimConfig
from ..simulation.noise import derive_seed
from ..utils.errors import ConfigError, QdiffError
from ..utils.misc import warn

# The sweep is meant for T << W
SWEEP_RATIO = 0.1

# x = W tau ranges of the two asymptotic flanks of the collapse curve
SMALL_X_RANGE = (0.02, 0.1)
LARGE_X_RANGE = (5.0, 20.0)

FAILED = 'Failed'
TRUNCATED = 'Truncated'

@dataclasses.dataclass
class SweepPoint:
    tau: float
    W: float
    f_theory: float
    f_numeric: float = np.nan
    f_numeric_err: float = np.nan
    flag: str = FAILED # A FitQuality value, `Truncated` or `Failed`
    estimate: object = None # DiffusionEstimate, when the fit succeeded
    message: str = ''

    @property
    def x(self):
        return self.W * self.tau

    def is_valid(self):
        return self.estimate is not None

def sweep_grid(tau_list, W_list):
    return list(itertools.product(tau_list, W_list))

def scaling_sweep(shape, tau_list, W_list, T, n_realizations, master_seed, workers=1, logger=None, sim_options=None):
    """
    Measures D for every (tau, W) of the grid and reduces it to f_numeric = D / (T^2 tau),
    to be compared with the scaling function f_theory(W tau).
    Input:
        `sim_options`, keyword arguments forwarded to SimConfig.auto (e.g. boundary_mass_limit)
    Output:
        one SweepPoint per grid point, in grid order (tau-major). A point whose
        simulation or fit failed is kept with flag `Failed` and the error message.
    """
    shape = Shape(shape)
    grid = sweep_grid(tau_list, W_list)
    if(not grid): raise ConfigError("the sweep grid is empty")
    if(not (T > 0)): raise ConfigError("tunneling T must be positive (got %s)" % T)
    if(any(not (v > 0) for v in itertools.chain(tau_list, W_list))):
        raise ConfigError("sweep values of tau and W must be positive")
    sim_options = sim_options or {}

    points = []
    for index, (tau, W) in enumerate(grid):
        if(T / W > SWEEP_RATIO): warn("T/W = %g exceeds %g at (tau = %g, W = %g)" % (T / W, SWEEP_RATIO, tau, W))
        kernel = build_kernel(shape, W=W, tau=tau)
        point = SweepPoint(tau=tau, W=W, f_theory=theory.scaling_function(shape, W * tau))
        if(logger is not None): logger.log("sweep point %i/%i: tau = %g, W = %g (x = %g)" % (index + 1, len(grid), tau, W, point.x))

        try:
            config = SimConfig.auto(T, kernel, **sim_options)
            stats = run_ensemble(config, n_realizations, derive_seed(master_seed, index), workers=workers, logger=logger)
            estimate = fit_diffusion(stats)
        except QdiffError as e:
            point.message = str(e)
            if(logger is not None): logger.log("sweep point %i failed: %s" % (index + 1, e))
            points.append(point)
            continue

        scale = T ** 2 * tau
        point.estimate = estimate
        point.f_numeric = estimate.D / scale
        point.f_numeric_err = estimate.total_stderr / scale
        point.flag = TRUNCATED if(stats.truncated) else estimate.quality.value
        if(logger is not None):
            logger.scalar('sweep/f_numeric', point.f_numeric, index)
            logger.scalar('sweep/f_ratio', point.f_numeric / point.f_theory, index)
        points.append(point)

    return points

def flank_slopes(points, small_range=SMALL_X_RANGE, large_range=LARGE_X_RANGE):
    """
    Log-log slopes of f_numeric on the two flanks of the collapse curve; a flank
    with fewer than two valid points has slope None.
    Output:
        {'small': (slope, n_points), 'large': (slope, n_points)}
    """
    valid = [p for p in points if p.is_valid() and p.f_numeric > 0]
    x = np.array([p.x for p in valid])
    f = np.array([p.f_numeric for p in valid])
    return {
        'small': loglog_slope(x, f, small_range),
        'large': loglog_slope(x, f, large_range),
    }
