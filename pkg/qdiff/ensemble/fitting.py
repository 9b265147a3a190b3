"""
Extraction of the diffusion coefficient from sigma^2(t) = 2 D t + c, fitted on
the asymptotic window where the spreading is diffusive.
"""

import dataclasses
import enum

import numpy as np
from scipy import stats as sp_stats

from ..physics import theory
from ..utils.errors import DomainError, FitWindowError
from ..utils.misc import loglog_fit, warn

# The fit window starts after FIT_START_DEPHASING_TIMES dephasing times and once sigma >= MIN_FIT_WIDTH sites
FIT_START_DEPHASING_TIMES = 5.0
MIN_FIT_WIDTH = 2.0
# The window should reach this many dephasing times
FIT_END_DEPHASING_TIMES = 20.0
# Gain in R^2 of a quadratic fit over the linear fit above which the data is deemed non-linear
NONLINEARITY_GAIN = 0.02
# Fewer window points than this flag the estimate as ShortWindow
MIN_GOOD_POINTS = 10

class FitQuality(enum.Enum):
    GOOD = 'Good'
    SHORT_WINDOW = 'ShortWindow'
    NON_LINEAR = 'NonLinear'

@dataclasses.dataclass(frozen=True)
class DiffusionEstimate:
    D: float
    stderr: float
    r_squared: float
    t_lo: float
    t_hi: float
    n_points: int
    quality: FitQuality
    intercept: float = 0.0
    ensemble_stderr: float = np.nan # Spread of the per-realization slopes over the same window

    @property
    def total_stderr(self):
        """
        Regression and ensemble standard errors combined in quadrature (regression only if there is no ensemble error).
        """
        if(np.isnan(self.ensemble_stderr)): return self.stderr
        return float(np.hypot(self.stderr, self.ensemble_stderr))

    def describe(self):
        return {
            'D': self.D, 'D_stderr': self.stderr, 'D_ensemble_stderr': self.ensemble_stderr,
            'r_squared': self.r_squared, 't_lo': self.t_lo, 't_hi': self.t_hi, 'n_points': self.n_points,
            'intercept': self.intercept, 'quality': self.quality.value,
        }

def _r_squared(y, fitted):
    ss_tot = np.sum((y - y.mean()) ** 2)
    if(ss_tot == 0): return 1.0
    return 1.0 - np.sum((y - fitted) ** 2) / ss_tot

def fit_window(times, sigma_squared, t_lo, t_hi):
    """
    Least-squares line through sigma^2(t) for t_lo <= t <= t_hi.
    Output:
        a DiffusionEstimate with D = slope / 2; the quality is NonLinear if a parabola
        fits markedly better or the slope is not positive, ShortWindow if there are
        few points, Good otherwise.
    """
    times = np.asarray(times, dtype=float)
    sigma_squared = np.asarray(sigma_squared, dtype=float)
    mask = (times >= t_lo) & (times <= t_hi)
    t, y = times[mask], sigma_squared[mask]
    if(len(t) < 3):
        raise FitWindowError("fit window [%g, %g] holds %i points, at least 3 are needed; increase t_max" % (t_lo, t_hi, len(t)))

    if(np.ptp(y) == 0):
        slope, intercept, stderr, r_squared = 0.0, float(y[0]), 0.0, 1.0
    else:
        fit = sp_stats.linregress(t, y)
        slope, intercept, stderr, r_squared = fit.slope, fit.intercept, fit.stderr, fit.rvalue ** 2
    quadratic_r_squared = _r_squared(y, np.polyval(np.polyfit(t, y, 2), t))

    if(slope <= 0 or (quadratic_r_squared - r_squared) > NONLINEARITY_GAIN): quality = FitQuality.NON_LINEAR
    elif(len(t) < MIN_GOOD_POINTS): quality = FitQuality.SHORT_WINDOW
    else: quality = FitQuality.GOOD

    return DiffusionEstimate(
        D=slope / 2.0, stderr=stderr / 2.0, r_squared=r_squared,
        t_lo=float(t[0]), t_hi=float(t[-1]), n_points=len(t),
        quality=quality, intercept=intercept,
    )

def ensemble_stderr(times, second_moments, t_lo, t_hi):
    """
    Standard error of D from the scatter of the realizations: half the standard error
    of the slopes of <j^2>(t) fitted separately for each realization over [t_lo, t_hi].
    NaN with fewer than two realizations.
    """
    second_moments = np.atleast_2d(second_moments)
    n_realizations = second_moments.shape[0]
    if(n_realizations < 2): return np.nan
    mask = (times >= t_lo) & (times <= t_hi)
    slopes = np.polyfit(times[mask], second_moments[:, mask].T, 1)[0]
    return float(0.5 * slopes.std(ddof=1) / np.sqrt(n_realizations))

def fit_diffusion(stats, tau_phi=None):
    """
    Fits D on the window starting at max(5 tau_phi, first time sigma >= 2 sites)
    and ending with the data.
    Input:
        `stats`, EnsembleStats (times and sigma_squared are used, and second_moments
            when present for the ensemble standard error)
        `tau_phi`, dephasing time; by default computed from the kernel of stats.config
            (0 when there is no config or the noise vanishes)
    """
    if(tau_phi is None):
        tau_phi = 0.0
        kernel = getattr(stats.config, 'kernel', None)
        if(kernel is not None and not kernel.is_null()): tau_phi = theory.dephasing_time(kernel)

    times = np.asarray(stats.times, dtype=float)
    sigma_squared = np.asarray(stats.sigma_squared, dtype=float)
    if(len(times) == 0): raise FitWindowError("no data to fit; increase t_max")

    wide = np.nonzero(sigma_squared >= MIN_FIT_WIDTH ** 2)[0]
    if(len(wide) == 0):
        raise FitWindowError("sigma never reaches %g sites before t = %g; increase t_max" % (MIN_FIT_WIDTH, times[-1]))
    t_lo = max(FIT_START_DEPHASING_TIMES * tau_phi, times[wide[0]])
    t_hi = times[-1]
    if(t_lo >= t_hi):
        raise FitWindowError("fit window is empty (t_lo = %g >= t_hi = %g); increase t_max" % (t_lo, t_hi))

    estimate = fit_window(times, sigma_squared, t_lo, t_hi)
    second_moments = getattr(stats, 'second_moments', None)
    if(second_moments is not None):
        estimate = dataclasses.replace(estimate, ensemble_stderr=ensemble_stderr(times, second_moments, estimate.t_lo, estimate.t_hi))
    if(t_hi < FIT_END_DEPHASING_TIMES * tau_phi):
        warn("data ends at t = %g, before %g dephasing times (%g); the fit window may be pre-asymptotic" % (t_hi, FIT_END_DEPHASING_TIMES, FIT_END_DEPHASING_TIMES * tau_phi))
        if(estimate.quality == FitQuality.GOOD): estimate = dataclasses.replace(estimate, quality=FitQuality.SHORT_WINDOW)
    return estimate

def loglog_slope(x, f, x_range):
    """
    Slope of log f against log x over the points with x in [x_range[0], x_range[1]].
    Output:
        (slope, n_points), or (None, n_points) if fewer than two points fall in the range
    """
    x, f = np.asarray(x, dtype=float), np.asarray(f, dtype=float)
    lo, hi = x_range
    mask = (x >= lo) & (x <= hi) & np.isfinite(f)
    n_points = int(mask.sum())
    if(n_points < 2):
        warn("only %i point(s) with x in [%g, %g]; no slope fitted" % (n_points, lo, hi))
        return None, n_points
    if(np.any(f[mask] <= 0)):
        raise DomainError("log-log slope needs positive values")
    slope, _ = loglog_fit(x[mask], f[mask])
    return float(slope), n_points
