"""Tests for mc_oracle module."""

import math

import numpy as np
import pytest
from scipy import stats

from nonlocal_cauchy.analysis.assumptions import AssumptionRegimeError
from nonlocal_cauchy.analysis.cauchy_solver import TimeSeriesField
from nonlocal_cauchy.analysis.levy_measure import reweight, stable_measure
from nonlocal_cauchy.analysis.mc_oracle import (
    PathSampler,
    bias_audit,
    build_sampler,
    default_jump_cut,
    feynman_kac,
    histogram_consistency,
    ks_distance,
    moment_audit,
    sample_paths,
)
from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.grid import Field, GridSpec


@pytest.fixture(name="cauchy")
def fixture_cauchy() -> PathSampler:
    return build_sampler(stable_measure(1.0, 1), seed=3, jump_cut=0.05)


class TestBuildSampler:
    """Test rates, drift and the small-jump cut."""

    def test_default_cut(self) -> None:
        """Test 4 sqrt(eps) <= 1e-3 on the quarter-decade ladder."""
        eps = default_jump_cut(stable_measure(0.5, 1))

        assert math.isclose(eps, 10.0**-7.25, rel_tol=1e-12)

    def test_cauchy_rates(self, cauchy: PathSampler) -> None:
        """Test the rate 2 / eps, no drift and the covariance 2 eps."""
        assert math.isclose(cauchy.total_rate, 40.0, rel_tol=1e-12)
        np.testing.assert_allclose(cauchy.drift, [0.0], atol=1e-15)
        np.testing.assert_allclose(cauchy.small_jump_cov, [[0.1]], rtol=1e-12)
        assert cauchy.gaussian

    def test_zero_cut(self) -> None:
        """Test that eps = 0 gives an infinite rate."""
        with pytest.raises(ParameterError):
            build_sampler(stable_measure(0.5, 1), seed=1, jump_cut=0.0)


class TestSamplePaths:
    """Test the compound Poisson sampler."""

    def test_zero_measure(self) -> None:
        """Test that pi = 0 leaves every path at the origin."""
        sampler = build_sampler(reweight(stable_measure(0.5, 1), 0.0), seed=1)

        samples = sample_paths(sampler, 1.0, 50)

        assert samples.shape == (50, 1)
        assert np.all(samples == 0.0)

    def test_thread_count_invariance(self, cauchy: PathSampler) -> None:
        """Test identical samples on one and three threads."""
        single = sample_paths(cauchy, 1.0, 10_000, threads=1)
        pooled = sample_paths(cauchy, 1.0, 10_000, threads=3)

        np.testing.assert_array_equal(single, pooled)

    def test_cauchy_distribution(self, cauchy: PathSampler) -> None:
        """Test the Kolmogorov-Smirnov distance to the Cauchy law of scale pi."""
        n = 20_000

        samples = sample_paths(cauchy, 1.0, n)

        distance = ks_distance(samples, stats.cauchy(scale=math.pi).cdf)
        assert distance <= 2.0 / math.sqrt(n)

    def test_symmetric_mean(self) -> None:
        """Test a vanishing mean for an order-3/2 symmetric measure."""
        sampler = build_sampler(stable_measure(1.5, 1), seed=5, jump_cut=0.05)
        n = 20_000

        samples = sample_paths(sampler, 1.0, n)[:, 0]

        stderr = samples.std(ddof=1) / math.sqrt(n)
        assert abs(samples.mean()) <= 4.0 * stderr

    def test_fractional_moment(self, cauchy: PathSampler) -> None:
        """Test E|Z_1|^(1/4) = pi^(1/4) / cos(pi / 8)."""
        n = 20_000

        powers = np.abs(sample_paths(cauchy, 1.0, n)[:, 0]) ** 0.25

        expected = math.pi**0.25 / math.cos(math.pi / 8.0)
        stderr = powers.std(ddof=1) / math.sqrt(n)
        assert abs(powers.mean() - expected) <= 5.0 * stderr

    def test_path_count(self, cauchy: PathSampler) -> None:
        """Test that an empty sample is refused."""
        with pytest.raises(ParameterError):
            sample_paths(cauchy, 1.0, 0)


class TestHistogram:
    """Test the chi-square comparison with the computed density."""

    def test_cauchy(self, cauchy: PathSampler) -> None:
        """Test agreement at t = 1 on 64 bins."""
        report = histogram_consistency(cauchy, GridSpec(1, 256, 64.0), 1.0, 20_000)

        assert report.name == "mc_histogram"
        assert report.passed

    @pytest.mark.parametrize("sigma,jump_cut,n", [(0.5, 1e-4, 4096), (1.5, 0.05, 1024)])
    def test_one_sided(self, sigma: float, jump_cut: float, n: int) -> None:
        """Test a measure with positive jumps only, below and above order one."""
        pi = stable_measure(sigma, 1, atoms=([[1.0]], [1.0]))
        sampler = build_sampler(pi, seed=11, jump_cut=jump_cut)

        report = histogram_consistency(sampler, GridSpec(1, n, 64.0), 1.0, 20_000)

        assert report.passed, report.details

    def test_bin_layout(self, cauchy: PathSampler) -> None:
        """Test that 32 points do not split into 64 bins."""
        with pytest.raises(ParameterError):
            histogram_consistency(cauchy, GridSpec(1, 32, 8.0), 1.0, 1000)


class TestMomentAudit:
    """Test the moment envelope."""

    def test_cauchy_envelope(self, cauchy: PathSampler) -> None:
        """Test a bounded envelope for alpha2 = 1/4."""
        report = moment_audit(cauchy, 0.25, [0.5, 1.0, 2.0, 4.0], 4000)

        assert report.name == "al00"
        assert report.passed
        assert report.value > 0.0
        assert len(report.details["per_t"]) == 4

    def test_wrong_regime(self) -> None:
        """Test alpha2 = 3/2 for an order-1/2 measure."""
        sampler = build_sampler(stable_measure(0.5, 1), seed=1, jump_cut=0.1)

        with pytest.raises(AssumptionRegimeError):
            moment_audit(sampler, 1.5, [1.0, 2.0], 100)


class TestFeynmanKac:
    """Test the path-integral representation."""

    def test_constant_datum(self, cauchy: PathSampler) -> None:
        """Test e^(-lambda t) with a vanishing standard error."""
        grid = GridSpec(1, 64, 16.0)

        estimates = feynman_kac(
            cauchy, 0.7, None, Field.constant(grid, 1.0), 1.0, [[0.0], [1.0]], 200
        )

        for item in estimates:
            assert math.isclose(item.estimate, math.exp(-0.7), rel_tol=1e-12)
            assert item.stderr <= 1e-12

    def test_constant_source(self, cauchy: PathSampler) -> None:
        """Test u = t for f = 1, g = 0 and lambda = 0."""
        grid = GridSpec(1, 64, 16.0)
        f = TimeSeriesField.from_function(
            grid, [0.0, 1.0, 2.0], lambda t, x: 1.0 + 0.0 * x
        )

        estimates = feynman_kac(cauchy, 0.0, f, None, 2.0, [[0.5]], 200)

        assert math.isclose(estimates[0].estimate, 2.0, rel_tol=1e-12)

    def test_single_mode(self, cauchy: PathSampler) -> None:
        """Test exp((psi - lambda) t) g with psi = -2 pi^2 |xi| at xi = 1/16."""
        grid = GridSpec(1, 64, 16.0)
        g = Field.mode(grid, (1,), real=True)
        probes = np.array([[0.0], [2.0], [5.0]])
        rate = -2.0 * math.pi**2 / 16.0 - 0.3

        estimates = feynman_kac(cauchy, 0.3, None, g, 1.0, probes, 20_000)

        for item, x in zip(estimates, probes[:, 0]):
            expected = math.exp(rate) * math.cos(2.0 * math.pi * x / 16.0)
            gap = abs(item.estimate - expected)
            assert gap <= 4.0 * item.stderr + item.bias_bound

    def test_path_floor(self, cauchy: PathSampler) -> None:
        """Test that fewer than 100 paths are refused."""
        grid = GridSpec(1, 64, 16.0)

        with pytest.raises(ParameterError):
            feynman_kac(cauchy, 0.0, None, Field.constant(grid, 1.0), 1.0, [[0.0]], 99)


class TestBiasAudit:
    """Test the small-jump bias ladder."""

    def test_monotone(self) -> None:
        """Test 4 sqrt(eps) for an order-1/2 measure."""
        report = bias_audit(stable_measure(0.5, 1), [1e-1, 1e-2, 1e-3])

        assert report.passed
        assert math.isclose(report.value, 4.0 * math.sqrt(1e-3), rel_tol=1e-9)
