import numpy as np
import pytest

from qdiff.physics.kernels import (
    ExponentialKernel, Regime, Shape, TabulatedKernel, TriangularKernel, WhiteNoiseKernel,
    build_kernel, dephasing_asymptote, dephasing_correlation, dephasing_exponent, kernel_beta, kernel_value,
)
from qdiff.utils.errors import ConfigError, DomainError

def test_triangular_value():
    kernel = TriangularKernel(W=2.0, tau=0.5)
    assert kernel_value(kernel, 0.0) == pytest.approx(4.0)
    assert kernel_value(kernel, 0.25) == pytest.approx(2.0)
    assert kernel_value(kernel, -0.25) == pytest.approx(2.0)
    assert kernel_value(kernel, 0.5) == 0.0
    assert kernel_value(kernel, 3.0) == 0.0

def test_exponential_value():
    kernel = ExponentialKernel(W=2.0, tau=0.5)
    assert kernel.value(0.5) == pytest.approx(4.0 * np.exp(-1.0))
    np.testing.assert_allclose(kernel.value([-1.0, 1.0]), 4.0 * np.exp(-2.0))

def test_beta():
    assert kernel_beta(TriangularKernel(3.0, 0.2)) == 0.5
    assert kernel_beta(ExponentialKernel(3.0, 0.2)) == 1.0
    with pytest.raises(DomainError):
        kernel_beta(WhiteNoiseKernel(1.0))

def test_triangular_dephasing_closed_form():
    kernel = TriangularKernel(W=1.0, tau=1.0)
    assert dephasing_correlation(kernel, 1.0) == pytest.approx(np.exp(-1.0 / 3.0), rel=1e-12)
    assert dephasing_correlation(kernel, 1.0) == pytest.approx(0.71653, abs=1e-5)
    # Past tau the exponent grows linearly
    assert dephasing_exponent(kernel, 3.0) == pytest.approx(1.5 - 1.0 / 6.0)

def test_exponential_dephasing_closed_form():
    kernel = ExponentialKernel(W=2.0, tau=0.5)
    assert dephasing_exponent(kernel, 1.0) == pytest.approx(4.0 * 0.25 * (1.0 + np.exp(-2.0)))

@pytest.mark.parametrize('kernel', [TriangularKernel(5.0, 0.5), TriangularKernel(0.3, 2.0), ExponentialKernel(5.0, 0.5), ExponentialKernel(0.3, 2.0)])
def test_closed_form_matches_quadrature(kernel):
    lags = np.array([1e-6, 1e-3, 0.1, 0.5, 1.0, 2.5, 10.0])
    np.testing.assert_allclose(kernel.dephasing_exponent(lags), kernel.quadrature_exponent(lags), rtol=1e-7, atol=1e-14)

def test_dephasing_correlation_range():
    kernel = ExponentialKernel(4.0, 0.3)
    lags = np.linspace(0.0, 5.0, 51)
    values = kernel.dephasing_correlation(lags)
    assert values[0] == 1.0
    assert np.all(values > 0) and np.all(values <= 1.0)
    assert np.all(np.diff(values) <= 0)

def test_negative_lag_is_rejected():
    with pytest.raises(DomainError):
        TriangularKernel(1.0, 1.0).dephasing_exponent(-0.1)

def test_long_time_asymptote():
    kernel = TriangularKernel(W=1.0, tau=0.01)
    exact = dephasing_correlation(kernel, 100.0)
    assert dephasing_asymptote(kernel, 100.0, Regime.LONG_TIME) == pytest.approx(exact, rel=1e-4)

def test_short_time_asymptote():
    for kernel in [TriangularKernel(1.0, 1.0), ExponentialKernel(1.0, 1.0)]:
        exact = dephasing_correlation(kernel, 1e-3)
        assert dephasing_asymptote(kernel, 1e-3, 'short') == pytest.approx(exact, rel=1e-9)

def test_white_noise():
    kernel = build_kernel('white', gamma=4.0)
    assert kernel.integral() == 2.0
    assert kernel.dephasing_exponent(0.5) == pytest.approx(1.0)
    assert kernel.dephasing_asymptote(0.5, 'long') == pytest.approx(np.exp(-1.0))
    with pytest.raises(DomainError):
        kernel.value(0.0)
    with pytest.raises(DomainError):
        kernel.W
    with pytest.raises(DomainError):
        kernel.dephasing_asymptote(0.5, 'short')
    assert kernel.describe() == {'shape': 'white', 'gamma': 4.0}

def test_null_kernel():
    assert TriangularKernel(0.0, 1.0).is_null()
    assert WhiteNoiseKernel(0.0).is_null()
    assert not ExponentialKernel(0.1, 1.0).is_null()
    assert TriangularKernel(0.0, 1.0).dephasing_correlation(7.0) == 1.0

@pytest.mark.parametrize('W, tau', [(-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_invalid_parameters(W, tau):
    with pytest.raises(ConfigError):
        TriangularKernel(W, tau)
    with pytest.raises(ConfigError):
        ExponentialKernel(W, tau)

def test_build_kernel():
    assert isinstance(build_kernel('triangular', W=1.0, tau=2.0), TriangularKernel)
    assert build_kernel(Shape.EXPONENTIAL, W=1.0, tau=2.0).shape == Shape.EXPONENTIAL
    with pytest.raises(ConfigError):
        build_kernel('tabulated', W=1.0, tau=1.0)
    with pytest.raises(ValueError):
        build_kernel('gaussian', W=1.0, tau=1.0)

def test_tabulated_reproduces_triangular():
    times = np.linspace(0.0, 1.0, 101)
    table = TabulatedKernel(times, 1.0 - times)
    reference = TriangularKernel(1.0, 1.0)

    assert table.W == pytest.approx(1.0)
    assert table.tau == pytest.approx(1.0 - np.exp(-1.0))
    assert table.integral() == pytest.approx(0.5)
    assert table.value(0.25) == pytest.approx(0.75)
    assert table.value(1.5) == 0.0
    lags = np.array([0.0, 0.3, 1.0, 2.0])
    np.testing.assert_allclose(table.dephasing_exponent(lags), reference.dephasing_exponent(lags), rtol=1e-6, atol=1e-12)

@pytest.mark.parametrize('times, values', [
    ([0.0], [1.0]), # too short
    ([0.1, 0.2], [1.0, 0.5]), # does not start at 0
    ([0.0, 0.2, 0.1], [1.0, 0.5, 0.2]), # times not increasing
    ([0.0, 0.1, 0.2], [1.0, 0.5, 0.7]), # values increasing
    ([0.0, 0.1], [1.0, -0.5]), # negative
    ([0.0, 0.1], [0.0, 0.0]), # C(0) = 0
])
def test_tabulated_validation(times, values):
    with pytest.raises(ConfigError):
        TabulatedKernel(times, values)

def test_tabulated_beta_uses_the_support():
    # A tabulated copy of the triangular kernel
    times = np.linspace(0.0, 1.0, 1000)
    table = TabulatedKernel(times, 1.0 - times)
    assert table.support_end == 1.0
    assert kernel_beta(table) == pytest.approx(0.5, abs=1e-3)
    # tau keeps the 1/e convention
    assert table.tau == pytest.approx(1.0 - np.exp(-1.0), rel=1e-3)

    # A table that never reaches zero is normalized by its last sample time
    assert kernel_beta(TabulatedKernel([0.0, 1.0], [1.0, 0.5])) == pytest.approx(0.75)

@pytest.mark.parametrize('kernel', [TriangularKernel(3.0, 0.2), ExponentialKernel(3.0, 0.2), WhiteNoiseKernel(4.0)])
def test_dephasing_exponent_is_non_decreasing(kernel):
    lags = np.linspace(0.0, 5.0, 1000)
    exponents = kernel.dephasing_exponent(lags)
    assert np.all(np.diff(exponents) >= 0)
    assert np.all(np.diff(kernel.dephasing_correlation(lags)) <= 0)

def test_triangular_long_lag_offset():
    kernel = TriangularKernel(W=3.0, tau=0.2)
    lags = np.linspace(10.0 * kernel.tau, 100.0 * kernel.tau, 50)
    offsets = kernel.dephasing_exponent(lags) - kernel.beta() * kernel.W ** 2 * kernel.tau * lags
    np.testing.assert_allclose(offsets, -kernel.W ** 2 * kernel.tau ** 2 / 6.0, rtol=1e-9)

@pytest.mark.parametrize('kernel', [TriangularKernel(5.0, 0.5), TriangularKernel(0.3, 2.0), ExponentialKernel(5.0, 0.5), ExponentialKernel(0.3, 2.0)])
def test_closed_form_matches_quadrature_up_to_twenty_tau(kernel):
    lags = np.linspace(0.0, 20.0 * kernel.tau, 101)
    np.testing.assert_allclose(kernel.dephasing_exponent(lags), kernel.quadrature_exponent(lags), rtol=1e-8, atol=0.0)
