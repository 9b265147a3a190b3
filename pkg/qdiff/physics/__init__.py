"""Noise correlation kernels and the analytical diffusion coefficient"""

from .kernels import CorrelationKernel, TriangularKernel, ExponentialKernel, WhiteNoiseKernel, TabulatedKernel, build_kernel
from .theory import TheoryParams, predict_diffusion, scaling_function, dephasing_time

__all__ = ['CorrelationKernel', 'TriangularKernel', 'ExponentialKernel', 'WhiteNoiseKernel', 'TabulatedKernel', 'build_kernel', 'TheoryParams', 'predict_diffusion', 'scaling_function', 'dephasing_time']
