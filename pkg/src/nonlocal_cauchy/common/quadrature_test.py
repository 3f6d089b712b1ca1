"""Tests for quadrature module."""

import math

import numpy as np
import pytest

from nonlocal_cauchy.common.quadrature import (
    gauss_legendre,
    linear_fit,
    log_slope,
    loglog_fit,
    panel_rule,
    power_law_integral,
    power_segment,
)


def _stable_density(r: np.ndarray) -> np.ndarray:
    return r**-1.5


class TestPanelRule:
    """Test composite Gauss-Legendre rules."""

    def test_weights_sum_to_length(self) -> None:
        """Test that the weights of a rule add up to the interval length."""
        nodes, weights = panel_rule(np.array([0.0, 1.0, 3.0]), 8)

        assert nodes.shape == (16,)
        assert math.isclose(float(weights.sum()), 3.0, rel_tol=1e-14)

    def test_polynomial_exactness(self) -> None:
        """Test that degree 2n-1 polynomials are integrated exactly."""
        nodes, weights = panel_rule(np.array([0.0, 2.0]), 4)

        result = float(np.sum(weights * nodes**7))

        assert math.isclose(result, 2.0**8 / 8.0, rel_tol=1e-13)

    def test_batched_edges(self) -> None:
        """Test that leading axes are broadcast."""
        edges = np.array([[0.0, 1.0], [0.0, 2.0]])

        nodes, weights = panel_rule(edges, 5)

        assert nodes.shape == (2, 5)
        np.testing.assert_allclose(weights.sum(axis=-1), [1.0, 2.0])

    def test_rule_is_cached(self) -> None:
        """Test that repeated requests return the same arrays."""
        assert gauss_legendre(8)[0] is gauss_legendre(8)[0]


class TestPowerSegment:
    """Test analytic power-law closures."""

    def test_convergent_lower_closure(self) -> None:
        """Test the integral of r^(1-1.5) over (0, 1]."""
        result = power_segment(1.0, 1.0, 0.5, 1.0, 0.0, 1.0)

        assert math.isclose(result, 2.0)

    def test_divergent_lower_closure(self) -> None:
        """Test that a borderline exponent diverges at zero."""
        assert math.isinf(power_segment(1.0, 1.0, 0.5, 0.5, 0.0, 1.0))

    def test_upper_closure(self) -> None:
        """Test the integral of r^(0.25-1.5) over [1, infinity)."""
        result = power_segment(1.0, 1.0, 0.5, 0.25, 1.0, math.inf)

        assert math.isclose(result, 4.0)

    def test_logarithmic_case(self) -> None:
        """Test the exponent-matching case on a finite interval."""
        result = power_segment(1.0, 1.0, 0.5, 0.5, 1.0, math.e)

        assert math.isclose(result, 1.0)


class TestPowerLawIntegral:
    """Test radial moments with closures."""

    def test_small_ball_moment(self) -> None:
        """Test the small-ball moment of a stable density."""
        result = power_law_integral(_stable_density, 1.0, 0.0, 1.0)

        assert result.converged
        assert math.isclose(result.value, 2.0, rel_tol=1e-8)

    def test_large_ball_moment(self) -> None:
        """Test the large-ball moment of a stable density."""
        result = power_law_integral(_stable_density, 0.25, 1.0, math.inf)

        assert math.isclose(result.value, 4.0, rel_tol=1e-8)

    def test_divergence_is_reported(self) -> None:
        """Test that a divergent moment is flagged rather than raised."""
        result = power_law_integral(_stable_density, 0.5, 0.0, 1.0)

        assert math.isinf(result.value)
        assert not result.converged
        assert "diverges at 0" in result.diagnostic

    def test_explicit_exponent(self) -> None:
        """Test that a supplied exponent is used by the closures."""
        result = power_law_integral(
            _stable_density, 2.0, 0.0, 1.0, exponent=lambda r: np.full_like(r, 0.5)
        )

        assert math.isclose(result.value, 1.0 / 1.5, rel_tol=1e-8)


class TestFits:
    """Test slope estimates and regressions."""

    def test_log_slope_of_power(self) -> None:
        """Test that the log slope of a power is its exponent."""
        slope = log_slope(lambda r: 3.0 * r**-1.7, np.array([1e-3, 1.0, 1e3]))

        np.testing.assert_allclose(slope, -1.7, rtol=1e-8)

    def test_log_slope_of_zero_is_nan(self) -> None:
        """Test that nonpositive values give NaN."""
        slope = log_slope(np.zeros_like, np.array([1.0]))

        assert np.isnan(slope[0])

    def test_loglog_fit_recovers_exponent(self) -> None:
        """Test a log-log regression on exact data."""
        x = np.geomspace(0.1, 10.0, 20)

        fit = loglog_fit(x, 2.0 * x**-1.0)

        assert fit.slope == pytest.approx(-1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(2.0), abs=1e-12)
        assert fit.residual < 1e-12

    def test_linear_fit_residual(self) -> None:
        """Test that scatter shows up in the residual."""
        fit = linear_fit(np.array([0.0, 1.0, 2.0, 3.0]), np.array([0.0, 1.0, 0.0, 1.0]))

        assert fit.residual > 0.1
