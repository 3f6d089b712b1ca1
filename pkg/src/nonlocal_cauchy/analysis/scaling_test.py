"""Tests for scaling module."""

import math

import numpy as np
import pytest

from nonlocal_cauchy.analysis.scaling import (
    GeneralizedInverse,
    ScalingError,
    ScalingTriple,
    audit_scaling,
    build_triple,
    order_from_kappa,
    piecewise_power_ell,
    power_exponents,
    power_law_triple,
    tabulated_triple,
)


def _square(r: np.ndarray) -> np.ndarray:
    return np.asarray(r, dtype=float) ** 2


class TestGeneralizedInverse:
    """Test tabulated generalized inverses."""

    def test_inverse_of_square(self) -> None:
        """Test that the inverse of r^2 is the square root."""
        inverse = GeneralizedInverse(_square)

        result = inverse(np.array([4.0, 1e-4, 9e6]))

        np.testing.assert_allclose(result, [2.0, 1e-2, 3e3], rtol=1e-12)

    def test_power_extrapolation_below_table(self) -> None:
        """Test that values below the table follow the end power law."""
        inverse = GeneralizedInverse(_square)

        result = inverse(np.array([1e-30]))

        np.testing.assert_allclose(result, [1e-15], rtol=1e-6)

    def test_flat_stretch_returns_infimum(self) -> None:
        """Test that a plateau maps to its left end."""

        def plateau(r: np.ndarray) -> np.ndarray:
            return np.minimum(r, 1.0) + np.maximum(r - 10.0, 0.0)

        inverse = GeneralizedInverse(plateau)

        result = float(inverse(np.array([1.0]))[0])

        assert math.isclose(result, 1.0, rel_tol=1e-12)

    def test_scalar_shape_preserved(self) -> None:
        """Test that a 0-d input gives a 0-d output."""
        inverse = GeneralizedInverse(_square)

        assert inverse(4.0).shape == ()


class TestPowerLawTriple:
    """Test the power-law scaling triple."""

    def test_exponents(self) -> None:
        """Test that the power exponents equal theta."""
        triple = power_law_triple(0.5)

        assert math.isclose(triple.theta0, 0.5, rel_tol=1e-12)
        assert math.isclose(triple.theta1, 0.5, rel_tol=1e-12)

    def test_point_evaluations(self) -> None:
        """Test scalar helpers."""
        triple = power_law_triple(2.0)

        assert math.isclose(triple.kappa_at(3.0), 9.0)
        assert math.isclose(triple.a_at(9.0), 3.0)
        assert math.isclose(triple.ell_at(0.5), 0.25)

    def test_rejects_nonpositive_theta(self) -> None:
        """Test that theta must be positive."""
        with pytest.raises(ScalingError):
            power_law_triple(0.0)

    def test_audit_passes(self) -> None:
        """Test that every invariant holds for a power law."""
        triple = power_law_triple(0.5)

        reports = audit_scaling(triple, sigma_hat=0.5)

        assert [r.name for r in reports] == [
            "scaling_inequality",
            "kappa_limits",
            "inverse_consistency",
            "power_bounds",
            "inverse_scaling",
            "order_decay",
        ]
        assert all(r.passed for r in reports)

    def test_order_from_kappa(self) -> None:
        """Test the regression order of a power law."""
        assert math.isclose(order_from_kappa(power_law_triple(1.5)), 1.5, rel_tol=1e-9)


class TestPiecewisePowerEll:
    """Test the two-exponent scaling factor."""

    def test_gamma_inverts_ell(self) -> None:
        """Test that l(gamma(t)) = t."""
        ell, gamma = piecewise_power_ell(1.05, 0.4, 0.7)
        t = np.geomspace(1e-6, 1e6, 25)

        result = ell(gamma(t))

        np.testing.assert_allclose(result, t, rtol=1e-12)

    def test_power_exponents_ordered(self) -> None:
        """Test theta1 <= theta0 for the fitted exponents."""
        ell, _ = piecewise_power_ell(1.05, 0.4, 0.7)

        theta0, theta1, base = power_exponents(ell)

        assert base == 2
        assert math.isclose(theta0, 1.4 + math.log(1.05) / math.log(2.0), rel_tol=1e-12)
        assert math.isclose(theta1, 0.8 - math.log(1.05) / math.log(2.0), rel_tol=1e-12)
        assert theta1 <= theta0

    def test_build_triple_tabulates_inverses(self) -> None:
        """Test that missing inverses are tabulated."""
        ell, gamma = piecewise_power_ell(1.0, 0.5, 0.5)

        triple = build_triple(_square, ell, "square", gamma=gamma)

        assert isinstance(triple.a_inv, GeneralizedInverse)
        assert math.isclose(triple.a_at(16.0), 4.0, rel_tol=1e-12)


class TestScalingTriple:
    """Test triple validation."""

    def test_rejects_unordered_exponents(self) -> None:
        """Test that theta1 > theta0 is refused."""
        with pytest.raises(ScalingError):
            ScalingTriple(_square, _square, _square, _square, 1.0, 2.0, "bad")


class TestTabulatedTriple:
    """Test scaling triples built from tables."""

    def test_power_table(self) -> None:
        """Test a table sampled from r^0.5."""
        r = np.geomspace(1e-3, 1e3, 61)

        triple = tabulated_triple(r, r**0.5)

        assert math.isclose(triple.kappa_at(2.0), math.sqrt(2.0), rel_tol=1e-12)
        assert math.isclose(triple.kappa_at(1e-6), 1e-3, rel_tol=1e-9)
        assert triple.ell_at(0.25) >= 0.5 * (1.0 - 1e-12)

    def test_rejects_decreasing_table(self) -> None:
        """Test that a decreasing kappa is refused."""
        with pytest.raises(ScalingError):
            tabulated_triple([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])
