import dataclasses

import numpy as np
import pytest
from scipy import stats

from qdiff.physics.kernels import ExponentialKernel, TabulatedKernel, TriangularKernel, WhiteNoiseKernel
from qdiff.simulation.noise import NoiseStream, derive_seed, empirical_autocovariance, moving_average_window, sample_noise_paths
from qdiff.utils.errors import ConfigError, DomainError, ResolutionError

# 40 sites x 25000 steps = 10^6 draws per statistic
N_SITES = 40
N_STEPS = 25000

def site_autocovariances(path, max_lag):
    """
    Autocovariance estimate of every site separately, shape (n_sites, max_lag + 1).
    """
    estimates = []
    for j in range(path.n_sites):
        single = dataclasses.replace(path, values=path.values[j:(j + 1)])
        estimates.append(empirical_autocovariance(single, max_lag)[1])
    return np.array(estimates)

def mean_and_stderr(estimates):
    return estimates.mean(axis=0), estimates.std(axis=0, ddof=1) / np.sqrt(len(estimates))

@pytest.mark.parametrize('kernel', [TriangularKernel(W=20.0, tau=0.01), ExponentialKernel(W=20.0, tau=0.01)])
def test_autocovariance_matches_kernel(kernel):
    dt = 0.001
    path = sample_noise_paths(kernel, n_sites=N_SITES, dt=dt, n_steps=N_STEPS, master_seed=7, realization=0)
    max_lag = int(round(2.0 * kernel.tau / dt))
    mean, stderr = mean_and_stderr(site_autocovariances(path, max_lag))
    expected = kernel.value(dt * np.arange(max_lag + 1))
    assert np.all(np.abs(mean - expected) < 4.0 * stderr)

def test_triangular_noise_at_reference_parameters():
    kernel = TriangularKernel(W=20.0, tau=0.01)
    path = sample_noise_paths(kernel, n_sites=N_SITES, dt=0.001, n_steps=N_STEPS, master_seed=8, realization=0)
    assert moving_average_window(kernel.tau, 0.001) == 10

    variance, variance_stderr = mean_and_stderr(path.values.var(axis=1))
    assert variance == pytest.approx(400.0, abs=(3.0 * variance_stderr))
    # Windows 10 steps apart do not overlap
    mean, stderr = mean_and_stderr(site_autocovariances(path, 10))
    assert abs(mean[10]) <= 3.0 * stderr[10]

@pytest.mark.parametrize('kernel', [TriangularKernel(W=20.0, tau=0.01), ExponentialKernel(W=20.0, tau=0.01), WhiteNoiseKernel(gamma=2.0)])
def test_noise_is_gaussian(kernel):
    path = sample_noise_paths(kernel, n_sites=N_SITES, dt=0.001, n_steps=N_STEPS, master_seed=9, realization=0)
    excess, stderr = mean_and_stderr(stats.kurtosis(path.values, axis=1))
    assert abs(excess) <= 3.0 * stderr

def test_white_noise_statistics():
    kernel = WhiteNoiseKernel(gamma=2.0)
    dt = 0.01
    path = sample_noise_paths(kernel, n_sites=N_SITES, dt=dt, n_steps=N_STEPS, master_seed=3, realization=0)
    lags, _ = empirical_autocovariance(path, 5)
    np.testing.assert_allclose(lags, dt * np.arange(6))
    mean, stderr = mean_and_stderr(site_autocovariances(path, 5))
    expected = np.zeros(6)
    expected[0] = kernel.gamma / dt
    assert np.all(np.abs(mean - expected) < 4.0 * stderr)

def test_sites_are_independent():
    kernel = TriangularKernel(W=20.0, tau=0.01)
    path = sample_noise_paths(kernel, n_sites=2, dt=0.001, n_steps=(N_SITES * N_STEPS // 2), master_seed=11, realization=2)
    # Cross-covariance of the two sites at lags 0..2M, estimated on independent blocks of the paths
    max_lag = 20
    blocks = path.values.reshape(2, N_SITES, -1)
    estimates = []
    for a, b in zip(blocks[0], blocks[1]):
        a, b = a - a.mean(), b - b.mean()
        estimates.append([np.dot(a[:(len(a) - m)], b[m:]) / len(a) for m in range(max_lag + 1)])
    mean, stderr = mean_and_stderr(np.array(estimates))
    assert np.all(np.abs(mean) < 4.0 * stderr)

def test_noise_is_stationary_from_the_start():
    # Across many sites, the first value already has the stationary variance W^2
    for kernel in [TriangularKernel(2.0, 0.5), ExponentialKernel(2.0, 0.5)]:
        path = sample_noise_paths(kernel, n_sites=4000, dt=0.05, n_steps=3, master_seed=5, realization=0)
        assert np.var(path.values[:, 0]) == pytest.approx(4.0, rel=0.1)

def test_determinism():
    kernel = ExponentialKernel(2.0, 0.3)
    first = sample_noise_paths(kernel, 5, 0.01, 100, master_seed=42, realization=3)
    second = sample_noise_paths(kernel, 5, 0.01, 100, master_seed=42, realization=3)
    np.testing.assert_array_equal(first.values, second.values)
    assert first.seed_info == second.seed_info

    other_realization = sample_noise_paths(kernel, 5, 0.01, 100, master_seed=42, realization=4)
    other_seed = sample_noise_paths(kernel, 5, 0.01, 100, master_seed=43, realization=3)
    assert not np.array_equal(first.values, other_realization.values)
    assert not np.array_equal(first.values, other_seed.values)

def test_site_streams_do_not_depend_on_lattice_size():
    kernel = TriangularKernel(1.0, 0.1)
    full = sample_noise_paths(kernel, 6, 0.01, 50, master_seed=1, realization=0)
    tail = sample_noise_paths(kernel, 2, 0.01, 50, master_seed=1, realization=0, site_offset=4)
    np.testing.assert_array_equal(full.values[4:], tail.values)
    # The stream of a site does not depend on the number of steps either
    longer = sample_noise_paths(ExponentialKernel(1.0, 0.1), 2, 0.01, 80, master_seed=1, realization=0)
    shorter = sample_noise_paths(ExponentialKernel(1.0, 0.1), 2, 0.01, 50, master_seed=1, realization=0)
    np.testing.assert_array_equal(longer.values[:, :50], shorter.values)

def test_noise_path_is_read_only():
    path = sample_noise_paths(TriangularKernel(1.0, 0.1), 2, 0.01, 10, master_seed=0, realization=0)
    assert path.values.shape == (2, 10)
    assert path.n_sites == 2 and path.n_steps == 10
    with pytest.raises(ValueError):
        path.values[0, 0] = 1.0

def test_moving_average_window():
    assert moving_average_window(0.01, 0.001) == 10
    with pytest.raises(ResolutionError):
        moving_average_window(1.0, 0.5)
    with pytest.raises(ResolutionError):
        moving_average_window(1.0, 0.23) # 4 steps of 0.23 miss tau by 8%

def test_resolution_errors():
    with pytest.raises(ResolutionError):
        sample_noise_paths(TriangularKernel(1.0, 0.01), 2, 0.01, 10, master_seed=0, realization=0)
    with pytest.raises(ResolutionError):
        sample_noise_paths(ExponentialKernel(1.0, 0.01), 2, 0.01, 10, master_seed=0, realization=0)

def test_unsupported_and_invalid_requests():
    table = TabulatedKernel([0.0, 1.0], [1.0, 0.0])
    with pytest.raises(DomainError):
        sample_noise_paths(table, 2, 0.01, 10, master_seed=0, realization=0)
    with pytest.raises(ConfigError):
        sample_noise_paths(TriangularKernel(1.0, 1.0), 0, 0.01, 10, master_seed=0, realization=0)
    with pytest.raises(ConfigError):
        sample_noise_paths(TriangularKernel(1.0, 1.0), 2, -0.01, 10, master_seed=0, realization=0)

def test_autocovariance_lag_limit():
    path = sample_noise_paths(WhiteNoiseKernel(1.0), 2, 0.01, 100, master_seed=0, realization=0)
    with pytest.raises(ConfigError):
        empirical_autocovariance(path, 10)
    assert len(empirical_autocovariance(path, 9)[1]) == 10

def test_derive_seed():
    assert derive_seed(5, 0) == derive_seed(5, 0)
    assert len({derive_seed(5, i) for i in range(10)}) == 10
    assert derive_seed(5, 1) != derive_seed(6, 1)

@pytest.mark.parametrize('kernel', [TriangularKernel(1.0, 0.1), ExponentialKernel(1.0, 0.1), WhiteNoiseKernel(1.0)])
def test_stream_blocks_match_the_whole_path(kernel):
    path = sample_noise_paths(kernel, 3, 0.01, 250, master_seed=4, realization=1, site_offset=2)
    stream = NoiseStream(kernel, 3, 0.01, 250, master_seed=4, realization=1, site_offset=2)
    blocks = list(stream.blocks(64))
    assert [block.shape[1] for block in blocks] == [64, 64, 64, 58]
    assert stream.position == 250
    np.testing.assert_array_equal(np.concatenate(blocks, axis=1), path.values)
    np.testing.assert_array_equal(np.concatenate(list(path.blocks(64)), axis=1), path.values)

def test_stream_cannot_overrun():
    stream = NoiseStream(TriangularKernel(1.0, 0.1), 2, 0.01, 10, master_seed=0, realization=0)
    assert stream.take(1).shape == (2, 1) # a single step from a fresh stream
    with pytest.raises(ConfigError):
        stream.take(10)
    with pytest.raises(ConfigError):
        list(stream.blocks(4, 20))
    assert [block.shape[1] for block in stream.blocks(4)] == [4, 4, 1]
