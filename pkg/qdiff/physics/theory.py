"""
Analytical diffusion coefficient of a tight-binding particle under on-site noise.

When T << W the dephasing of each site is fast compared to the change of the
site probabilities, and the ensemble-averaged probabilities obey a classical
master equation with D = 2 T^2 Q, Q = integral of C_phi(t)^2 from 0 to infinity.
"""

import dataclasses
import enum

import numpy as np
from scipy import integrate, optimize

from .kernels import CorrelationKernel, Shape, WhiteNoiseKernel, build_kernel, QUAD_EPSABS, QUAD_EPSREL, QUAD_LIMIT
from ..utils.errors import BallisticError, ConfigError, DomainError
from ..utils.misc import warn

# Above this T/W ratio the perturbative result is flagged as outside its validity regime
VALIDITY_RATIO = 0.2

# The pair factor is integrated until exp(-2 g(t)) drops below this fraction of its peak (1 at t = 0)
TRUNCATION_LEVEL = 1e-14

# Wtau thresholds of `classify_regime`
SHORT_CORRELATION_MAX = 0.1
LONG_CORRELATION_MIN = 10.0

class CorrelationRegime(enum.Enum):
    SHORT = 'ShortCorrelation'
    CROSSOVER = 'Crossover'
    LONG = 'LongCorrelation'

@dataclasses.dataclass(frozen=True)
class TheoryParams:
    tunneling_T: float
    kernel: CorrelationKernel

    def __post_init__(self):
        if(not (self.tunneling_T > 0)):
            raise ConfigError("tunneling T must be positive (got %s)" % self.tunneling_T)
        ratio = self.ratio
        if(ratio is not None and ratio > VALIDITY_RATIO):
            warn("T/W = %g exceeds %g: the perturbative diffusion coefficient assumes T << W" % (ratio, VALIDITY_RATIO))

    @property
    def ratio(self):
        """
        T/W, or None when W is undefined (white noise) or zero.
        """
        if(isinstance(self.kernel, WhiteNoiseKernel) or self.kernel.W == 0): return None
        return self.tunneling_T / self.kernel.W

    @property
    def valid_regime(self):
        ratio = self.ratio
        return (ratio is None) or (ratio <= VALIDITY_RATIO)

    @classmethod
    def from_args(cls, args):
        return cls(tunneling_T=args.T, kernel=CorrelationKernel.from_args(args))

def _check_not_null(kernel):
    if(kernel.is_null()): raise BallisticError()

def truncation_time(kernel):
    """
    Time beyond which exp(-2 g(t)) < TRUNCATION_LEVEL. Starts from the asymptotic
    estimates (motional-narrowing exponential, capped by the Gaussian bound) and
    doubles until the exact exponent confirms it.
    """
    target = -0.5 * np.log(TRUNCATION_LEVEL)
    t = target / kernel.integral()
    if(not isinstance(kernel, WhiteNoiseKernel)): t = min(t, np.sqrt(2.0 * target) / kernel.W)
    while(kernel.dephasing_exponent(t) < target):
        t *= 2.0
    return t

def pair_factor(kernel):
    """
    Q = integral over t in [0, infinity) of C_phi(t)^2 = exp(-2 g(t)).
    """
    _check_not_null(kernel)
    if(isinstance(kernel, WhiteNoiseKernel)): return 1.0 / kernel.gamma

    t_max = truncation_time(kernel)
    points = kernel.breakpoints(t_max)
    value, _ = integrate.quad(lambda t: np.exp(-2.0 * kernel.dephasing_exponent(t)), 0.0, t_max, points=points, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    return value

def predict_diffusion(params):
    """
    D = 2 T^2 * integral of exp(-2 g(t)) over t in [0, infinity), in sites^2 per unit time.
    """
    return 2.0 * params.tunneling_T ** 2 * pair_factor(params.kernel)

def diffusion_short_corr_limit(params):
    """
    Motional-narrowing limit (W tau << 1): D = T^2 / (beta W^2 tau) = 2 T^2 / (integral of C over all t).
    """
    _check_not_null(params.kernel)
    return params.tunneling_T ** 2 / params.kernel.integral()

def diffusion_long_corr_limit(W, T):
    """
    Slow-noise closed form (W tau >> 1): D = sqrt(2 pi) T^2 / W, independent of tau and of the kernel shape.
    The W tau -> infinity limit of `predict_diffusion` itself is sqrt(pi) T^2 / W, a factor sqrt(2) lower.
    """
    if(W == 0): raise BallisticError()
    if(W < 0): raise DomainError("noise magnitude W must be positive (got %s)" % W)
    return np.sqrt(2.0 * np.pi) * T ** 2 / W

def scaling_function(shape, x):
    """
    f(x) with D = T^2 tau f(W tau), computed from the full result at T = 1, tau = 1, W = x.
    """
    if(not (x > 0)): raise DomainError("scaling variable x = W tau must be positive (got %s)" % x)
    shape = Shape(shape)
    if(shape in (Shape.WHITE, Shape.TABULATED)):
        raise DomainError("the scaling function is defined for parametric kernel shapes only (got %s)" % shape.value)
    return 2.0 * pair_factor(build_kernel(shape, W=x, tau=1.0))

def classify_regime(kernel):
    if(isinstance(kernel, WhiteNoiseKernel)): return CorrelationRegime.SHORT
    x = kernel.W * kernel.tau
    if(x < SHORT_CORRELATION_MAX): return CorrelationRegime.SHORT
    if(x > LONG_CORRELATION_MIN): return CorrelationRegime.LONG
    return CorrelationRegime.CROSSOVER

def dephasing_time(kernel):
    """
    tau_phi, the lag at which C_phi = 1/e (i.e. g(tau_phi) = 1), found by bisection.
    Infinite for a null kernel.
    """
    if(kernel.is_null()): return np.inf
    if(isinstance(kernel, WhiteNoiseKernel)): return 2.0 / kernel.gamma

    # g(t) <= min(W^2 t^2 / 2, t * integral), so g stays below 1 up to the larger of the two crossing times
    lo = max(1.0 / kernel.integral(), np.sqrt(2.0) / kernel.W)
    g = (lambda t: kernel.dephasing_exponent(t) - 1.0)
    if(g(lo) >= 0): return lo
    hi = 2.0 * lo
    while(g(hi) < 0):
        lo, hi = hi, 2.0 * hi
    return optimize.bisect(g, lo, hi, xtol=1e-12 * hi, maxiter=200)

def theory_record(params):
    """
    Every theory quantity reported for a parameter set; limits and shape factors
    that are undefined for the kernel are None.
    """
    kernel = params.kernel
    T = params.tunneling_T
    white = isinstance(kernel, WhiteNoiseKernel)

    return {
        'D': predict_diffusion(params),
        'D_short_limit': diffusion_short_corr_limit(params),
        'D_long_limit': None if(white) else diffusion_long_corr_limit(kernel.W, T),
        'beta': None if(white) else kernel.beta(),
        'x': None if(white) else kernel.W * kernel.tau,
        'regime': classify_regime(kernel).value,
        'tau_phi': dephasing_time(kernel),
        'T_over_W': params.ratio,
        'valid_regime': params.valid_regime,
    }
