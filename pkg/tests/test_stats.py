"""Median and bootstrap error-bar estimation."""

import numpy as np
import pytest

from qaus.stats import BootstrapEstimate, bootstrap_median, median


def test_median_examples():
    assert median([1, 2, 3]) == 2
    assert median([1, 2, 3, 4]) == 2.5
    assert median([5]) == 5


def test_median_empty_rejected():
    with pytest.raises(ValueError):
        median([])


def test_bootstrap_constant_values():
    est = bootstrap_median([3.0] * 50)
    assert est.mean_of_medians == 3.0
    assert est.std_of_medians == 0.0
    assert est.error_bar == 0.0


def test_bootstrap_median_robust_to_single_outlier():
    values = [0.0] * 199 + [1.0]
    est = bootstrap_median(values)
    assert est.mean_of_medians == 0.0
    assert est.std_of_medians == 0.0


def test_bootstrap_uniform_sample():
    """200 Uniform(0,1) draws: mean of medians near 1/2; std near the
    asymptotic median standard error 1/(2 sqrt(200)) ~ 0.0354."""
    rng = np.random.default_rng(1)
    values = rng.uniform(0.0, 1.0, size=200)
    est = bootstrap_median(values, resamples=1000, seed=0)
    assert abs(est.mean_of_medians - 0.5) < 0.05
    asymptotic = 1.0 / (2.0 * np.sqrt(200.0))
    assert abs(est.std_of_medians - asymptotic) < 0.5 * asymptotic


def test_bootstrap_deterministic_and_permutation_invariant():
    rng = np.random.default_rng(7)
    values = rng.normal(size=101)
    a = bootstrap_median(values, seed=3)
    b = bootstrap_median(values[::-1].copy(), seed=3)
    c = bootstrap_median(rng.permutation(values), seed=3)
    assert a == b == c


def test_bootstrap_mean_within_range():
    rng = np.random.default_rng(8)
    values = rng.normal(size=37)
    est = bootstrap_median(values)
    assert values.min() <= est.mean_of_medians <= values.max()


def test_bootstrap_resample_count_stability():
    rng = np.random.default_rng(9)
    values = rng.normal(size=200)
    small = bootstrap_median(values, resamples=1000, seed=0)
    large = bootstrap_median(values, resamples=10000, seed=0)
    assert abs(small.mean_of_medians - large.mean_of_medians) <= small.error_bar


def test_bootstrap_validation():
    with pytest.raises(ValueError):
        bootstrap_median([])
    with pytest.raises(ValueError):
        bootstrap_median([1.0], resamples=0)


def test_estimate_fields():
    est = BootstrapEstimate(0.5, 0.01, 1000, 200)
    assert est.error_bar == 0.02
