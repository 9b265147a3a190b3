"""
Noise correlation kernels C(t) and the dephasing correlation they induce.

All times and energies are in units where hbar = 1. Evaluation methods accept
scalars or numpy arrays and return the same kind.
"""

from abc import ABCMeta, abstractmethod
import enum

import numpy as np
from scipy import integrate

from ..utils.errors import ConfigError, DomainError

# Adaptive quadrature tolerances shared by every numerical integral over a kernel
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8
QUAD_LIMIT = 500

class Shape(enum.Enum):
    TRIANGULAR = 'triangular'
    EXPONENTIAL = 'exponential'
    WHITE = 'white'
    TABULATED = 'tabulated'

class Regime(enum.Enum):
    LONG_TIME = 'long'
    SHORT_TIME = 'short'

def _scalar_or_array(values, like):
    return values.item() if(np.ndim(like) == 0) else values

def _checked_dt(dt):
    dt = np.asarray(dt, dtype=float)
    if(np.any(dt < 0) or np.any(np.isnan(dt))):
        raise DomainError("dephasing time lag must be non-negative (got %s)" % dt)
    return dt

class CorrelationKernel(metaclass=ABCMeta):
    """
    Autocorrelation C(t) = <xi(j, t') xi(j, t' + t)> of the on-site noise.
    Kernels are immutable values.
    """
    shape = None

    @property
    @abstractmethod
    def W(self):
        """
        Noise magnitude, with C(0) = W^2.
        """
        pass

    @property
    @abstractmethod
    def tau(self):
        """
        Correlation time.
        """
        pass

    @abstractmethod
    def _value(self, t):
        # `t`: non-negative array
        pass

    @abstractmethod
    def integral(self):
        """
        Integral of C(t) for t from 0 to infinity.
        """
        pass

    @abstractmethod
    def _exponent(self, dt):
        # `dt`: non-negative array
        pass

    def is_null(self):
        return (self.integral() == 0.0)

    def value(self, t):
        """
        C(|t|); the kernel is symmetric in time.
        """
        t = np.abs(np.asarray(t, dtype=float))
        return _scalar_or_array(np.asarray(self._value(t), dtype=float), t)

    def beta(self):
        """
        Shape factor beta = (1 / (W^2 tau)) * integral of C from 0 to infinity.
        """
        return self.integral() / (self.W ** 2 * self.tau)

    def dephasing_exponent(self, dt):
        """
        g(dt) = integral over t in [0, dt] of (dt - t) C(t), so that C_phi(dt) = exp(-g(dt)).
        """
        dt = _checked_dt(dt)
        return _scalar_or_array(np.asarray(self._exponent(dt), dtype=float), dt)

    def dephasing_correlation(self, dt):
        """
        C_phi(dt) = <exp(-i (phi(t + dt) - phi(t)))> = exp(-g(dt)), in (0, 1].
        """
        return np.exp(-self.dephasing_exponent(dt))

    def dephasing_asymptote(self, dt, regime):
        """
        Asymptotic forms of C_phi: exp(-beta W^2 tau dt) for dt >> tau (motional
        narrowing), exp(-W^2 dt^2 / 2) for dt << tau (shape-independent Gaussian).
        """
        regime = Regime(regime)
        dt = _checked_dt(dt)
        if(regime == Regime.LONG_TIME): exponent = self.integral() * dt
        else: exponent = 0.5 * self.W ** 2 * dt ** 2
        return _scalar_or_array(np.exp(-exponent), dt)

    def quadrature_exponent(self, dt):
        """
        g(dt) by adaptive quadrature, independently of any closed form.
        """
        dt = _checked_dt(dt)
        out = np.array([self._quad_exponent(x) for x in dt.ravel()]).reshape(dt.shape)
        return _scalar_or_array(out, dt)

    def breakpoints(self, upper):
        return None

    def _quad_exponent(self, dt):
        if(dt == 0.0): return 0.0
        points = self.breakpoints(dt)
        value, _ = integrate.quad(lambda t: (dt - t) * self._value(np.abs(t)), 0.0, dt, points=points, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
        return value

    def describe(self):
        return {'shape': self.shape.value, 'W': self.W, 'tau': self.tau}

    def __repr__(self):
        return '%s(%s)' % (type(self).__name__, ', '.join('%s=%r' % kv for kv in self.describe().items() if(kv[0] != 'shape')))

    @classmethod
    def from_args(cls, args):
        """
        Builds the kernel described by the parsed command-line arguments.
        """
        shape = Shape(args.shape)
        if(shape == Shape.WHITE): return WhiteNoiseKernel(args.gamma)
        if(shape == Shape.TABULATED):
            from ..utils.io import read_csv
            try: _, table = read_csv(args.table)
            except (OSError, ValueError) as e: raise ConfigError("cannot read kernel table '%s': %s" % (args.table, e))
            if(table.ndim != 2 or table.shape[1] != 2):
                raise ConfigError("kernel table '%s' must have exactly two columns (time, value)" % args.table)
            return TabulatedKernel(table[:, 0], table[:, 1])
        return build_kernel(shape, args.W, args.tau)

class TriangularKernel(CorrelationKernel):
    """
    C(t) = W^2 (1 - |t| / tau) for |t| <= tau, 0 beyond.
    """
    shape = Shape.TRIANGULAR

    def __init__(self, W, tau):
        if(W < 0): raise ConfigError("noise magnitude W must be non-negative (got %s)" % W)
        if(tau <= 0): raise ConfigError("correlation time tau must be positive (got %s)" % tau)
        self._W = float(W)
        self._tau = float(tau)

    @property
    def W(self): return self._W

    @property
    def tau(self): return self._tau

    def _value(self, t):
        return self._W ** 2 * np.clip(1.0 - t / self._tau, 0.0, None)

    def integral(self):
        return 0.5 * self._W ** 2 * self._tau

    def beta(self):
        return 0.5

    def _exponent(self, dt):
        W2, tau = self._W ** 2, self._tau
        inside = W2 * (0.5 * dt ** 2 - dt ** 3 / (6.0 * tau))
        beyond = W2 * (0.5 * tau * dt - tau ** 2 / 6.0)
        return np.where(dt <= tau, inside, beyond)

    def breakpoints(self, upper):
        return [self._tau] if(self._tau < upper) else None

class ExponentialKernel(CorrelationKernel):
    """
    C(t) = W^2 exp(-|t| / tau).
    """
    shape = Shape.EXPONENTIAL

    def __init__(self, W, tau):
        if(W < 0): raise ConfigError("noise magnitude W must be non-negative (got %s)" % W)
        if(tau <= 0): raise ConfigError("correlation time tau must be positive (got %s)" % tau)
        self._W = float(W)
        self._tau = float(tau)

    @property
    def W(self): return self._W

    @property
    def tau(self): return self._tau

    def _value(self, t):
        return self._W ** 2 * np.exp(-t / self._tau)

    def integral(self):
        return self._W ** 2 * self._tau

    def beta(self):
        return 1.0

    def _exponent(self, dt):
        x = dt / self._tau
        # x - 1 + exp(-x); Taylor series below 1e-3 where the sum cancels
        series = x ** 2 * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)))
        return self._W ** 2 * self._tau ** 2 * np.where(x < 1e-3, series, x + np.expm1(-x))

class WhiteNoiseKernel(CorrelationKernel):
    """
    Delta-correlated noise C(t) = gamma * delta(t). Only gamma (the integral of C
    over all times) is meaningful; W and tau do not exist individually.
    """
    shape = Shape.WHITE

    def __init__(self, gamma):
        if(gamma is None or gamma < 0): raise ConfigError("white-noise strength gamma must be non-negative (got %s)" % gamma)
        self.gamma = float(gamma)

    @property
    def W(self):
        raise DomainError("white noise has no finite magnitude W")

    @property
    def tau(self):
        raise DomainError("white noise has no finite correlation time tau")

    def value(self, t):
        raise DomainError("white noise has no pointwise value (C is a distribution)")

    def _value(self, t):
        raise DomainError("white noise has no pointwise value (C is a distribution)")

    def integral(self):
        return 0.5 * self.gamma

    def beta(self):
        raise DomainError("beta is undefined for white noise (no finite tau)")

    def _exponent(self, dt):
        return 0.5 * self.gamma * dt

    def quadrature_exponent(self, dt):
        return self.dephasing_exponent(dt)

    def dephasing_asymptote(self, dt, regime):
        if(Regime(regime) == Regime.SHORT_TIME):
            raise DomainError("white noise has no short-time (Gaussian) dephasing regime")
        return super().dephasing_asymptote(dt, regime)

    def describe(self):
        return {'shape': self.shape.value, 'gamma': self.gamma}

class TabulatedKernel(CorrelationKernel):
    """
    C(t) given by samples (t_i, C_i) on t >= 0, linearly interpolated and zero past the last sample.
    The table must start at t = 0, be non-negative and non-increasing.
    tau is the first time at which C drops below C(0) / e; it only serves to
    classify the regime. beta is normalized by the end of the support instead.
    """
    shape = Shape.TABULATED

    def __init__(self, times, values):
        times = np.array(times, dtype=float)
        values = np.array(values, dtype=float)

        if(times.ndim != 1 or times.shape != values.shape or len(times) < 2):
            raise ConfigError("a kernel table needs at least two (time, value) pairs")
        if(times[0] != 0.0):
            raise ConfigError("a kernel table must start at t = 0 (got t = %s)" % times[0])
        if(np.any(np.diff(times) <= 0)):
            raise ConfigError("kernel table times must be strictly increasing")
        if(np.any(values < 0)):
            raise ConfigError("kernel table values must be non-negative")
        if(np.any(np.diff(values) > 0)):
            raise ConfigError("kernel table values must be non-increasing in t")
        if(values[0] <= 0):
            raise ConfigError("kernel table must have C(0) = W^2 > 0")

        times.setflags(write=False)
        values.setflags(write=False)
        self.times = times
        self.values = values
        self._tau = self._one_over_e_time()

    def _one_over_e_time(self):
        threshold = self.values[0] / np.e
        below = np.nonzero(self.values < threshold)[0]
        if(len(below) == 0): return float(self.times[-1])
        i = below[0]
        # Linear interpolation inside [t_{i-1}, t_i]
        t0, t1 = self.times[i - 1], self.times[i]
        c0, c1 = self.values[i - 1], self.values[i]
        return float(t0 + (c0 - threshold) * (t1 - t0) / (c0 - c1))

    @property
    def W(self): return float(np.sqrt(self.values[0]))

    @property
    def tau(self): return self._tau

    def _value(self, t):
        return np.interp(t, self.times, self.values, right=0.0)

    def integral(self):
        return float(integrate.trapezoid(self.values, self.times))

    @property
    def support_end(self):
        """
        First sampled time at which C reaches 0, or the last sample time if it never does.
        """
        zero = np.nonzero(self.values == 0.0)[0]
        return float(self.times[zero[0]]) if(len(zero) > 0) else float(self.times[-1])

    def beta(self):
        return self.integral() / (self.values[0] * self.support_end)

    def _exponent(self, dt):
        return np.array([self._quad_exponent(x) for x in dt.ravel()]).reshape(dt.shape)

    def breakpoints(self, upper):
        inner = self.times[(self.times > 0) & (self.times < upper)]
        if(len(inner) == 0): return None
        # quad accepts a limited number of breakpoints; keep an evenly spread subset
        if(len(inner) > QUAD_LIMIT // 2): inner = inner[np.linspace(0, len(inner) - 1, QUAD_LIMIT // 2).astype(int)]
        return list(inner)

    def describe(self):
        return {'shape': self.shape.value, 'W': self.W, 'tau': self.tau, 'n_samples': len(self.times)}

def build_kernel(shape, W=None, tau=None, gamma=None):
    """
    Kernel factory from a shape name and its parameters.
    """
    shape = Shape(shape)
    if(shape == Shape.TRIANGULAR): return TriangularKernel(W, tau)
    if(shape == Shape.EXPONENTIAL): return ExponentialKernel(W, tau)
    if(shape == Shape.WHITE): return WhiteNoiseKernel(gamma)
    raise ConfigError("tabulated kernels are built from a table, not from (W, tau)")

# Function forms of the kernel operations

def kernel_value(kernel, t):
    return kernel.value(t)

def kernel_beta(kernel):
    return kernel.beta()

def dephasing_exponent(kernel, dt):
    return kernel.dephasing_exponent(dt)

def dephasing_correlation(kernel, dt):
    return kernel.dephasing_correlation(dt)

def dephasing_asymptote(kernel, dt, regime):
    return kernel.dephasing_asymptote(dt, regime)
