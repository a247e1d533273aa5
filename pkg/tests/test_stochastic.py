import numpy as np
import pytest

from cavitylab.errors import DomainError
from cavitylab.model import ModelParams
from cavitylab.stochastic import (
    estimate_correlation,
    estimate_mean_field,
    sample_noise_path,
    splitmix64,
    trial_rng,
)


def test_splitmix_reference_values():
    # first outputs of the reference SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4


def test_noise_variance():
    path = sample_noise_path(2.0, 0.01, 100_000, seed=11)
    power = np.abs(path.samples) ** 2
    # |F|^2 is exponential with mean kappa/dt, so its std equals its mean
    target = 2.0 / 0.01
    assert abs(power.mean() - target) < 3 * target / np.sqrt(power.size)
    assert abs(path.samples.mean()) < 5 * np.sqrt(target / power.size)


def test_noise_zero_kappa():
    path = sample_noise_path(0.0, 0.01, 50, seed=1)
    assert np.all(path.samples == 0)


def test_noise_seeded():
    a = sample_noise_path(1.0, 0.1, 100, seed=5)
    b = sample_noise_path(1.0, 0.1, 100, seed=5)
    c = sample_noise_path(1.0, 0.1, 100, seed=6)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


@pytest.mark.parametrize("kw", [{"dt": 0}, {"steps": 0}, {"kappa": -1}])
def test_noise_validation(kw):
    args = {"kappa": 1.0, "dt": 0.1, "steps": 10, "seed": 0, **kw}
    with pytest.raises(DomainError):
        sample_noise_path(**args)


def test_trial_streams_distinct():
    x = trial_rng(3, 0).standard_normal(4)
    y = trial_rng(3, 1).standard_normal(4)
    z = trial_rng(4, 0).standard_normal(4)
    assert not np.array_equal(x, y)
    np.testing.assert_array_equal(y, z)  # stream index is seed + trial


@pytest.mark.parametrize("kappa", [2.0, 4.0])
def test_midpoint_correlation(kappa):
    est = estimate_correlation(ModelParams(0, kappa, 0), dt=1e-3, steps=10_000, trials=200, seed=1)
    assert abs(est.estimate - kappa / 2) < 3 * est.stderr
    assert abs(est.ito) < 3 * est.ito_stderr
    assert abs(est.endpoint - kappa) < 3 * est.endpoint_stderr


def test_drive_does_not_change_correlation():
    a = estimate_correlation(ModelParams(0, 2, 0), trials=50, seed=2)
    b = estimate_correlation(ModelParams(0, 2, 1.5), trials=50, seed=2)
    assert abs(a.estimate - b.estimate) < 3 * a.stderr


def test_noiseless_control():
    est = estimate_correlation(ModelParams(0, 2, 1), trials=3, noiseless=True)
    assert est.estimate == 0 and est.ito == 0 and est.endpoint == 0


def test_dt_robust():
    p = ModelParams(0, 2, 0)
    coarse = estimate_correlation(p, dt=2e-3, steps=5_000, trials=200, seed=9)
    fine = estimate_correlation(p, dt=1e-3, steps=10_000, trials=200, seed=9)
    band = 3 * np.hypot(coarse.stderr, fine.stderr)
    assert abs(coarse.estimate - fine.estimate) < band


def test_deterministic():
    p = ModelParams(0, 2, 0.3)
    assert estimate_correlation(p, trials=10, seed=4) == estimate_correlation(p, trials=10, seed=4)


def test_transient_guard():
    with pytest.raises(DomainError):
        estimate_correlation(ModelParams(0, 1, 0), dt=1e-3, steps=9_999)


def mean_field_band(kappa, dt, trials):
    # time average over T = 20/kappa of an OU component with variance 1/2 and
    # correlation time 2/kappa has variance 2 / (kappa T)
    T = 20.0 / kappa
    return 5 * np.sqrt(2 / (kappa * T) / trials)


def test_mean_field():
    m = estimate_mean_field(ModelParams(0, 2, 1), trials=200, seed=3)
    band = mean_field_band(2, 1e-3, 200)
    assert abs(m.real - 1.0) < band and abs(m.imag) < band


def test_mean_field_undriven():
    m = estimate_mean_field(ModelParams(0, 2, 0), trials=200, seed=3)
    assert abs(m) < mean_field_band(2, 1e-3, 200)


def test_mean_field_linear_in_drive():
    # same noise in both runs, so the drive response is exactly linear
    base = estimate_mean_field(ModelParams(0, 2, 0), trials=20, seed=8)
    one = estimate_mean_field(ModelParams(0, 2, 1), trials=20, seed=8)
    two = estimate_mean_field(ModelParams(0, 2, 2), trials=20, seed=8)
    assert (two - base) == pytest.approx(2 * (one - base), rel=1e-9)


def test_mean_field_requires_free_mode():
    with pytest.raises(DomainError):
        estimate_mean_field(ModelParams(0.1, 2, 1))
