"""Tests for levy_measure module."""

import math

import numpy as np
import pytest

from nonlocal_cauchy.analysis.levy_measure import (
    MeasureKind,
    MeasureValidationError,
    RadialProfile,
    common_atoms,
    difference,
    directional_density,
    directional_second_moment,
    estimate_order,
    radial_angular_measure,
    radial_moment,
    reweight,
    scale_measure,
    sphere_design,
    stable_measure,
    superpose,
    truncate,
)
from nonlocal_cauchy.analysis.scaling import power_law_triple
from nonlocal_cauchy.common.errors import ParameterError


class TestSphereDesign:
    """Test the angular surrogates of the sphere measure."""

    @pytest.mark.parametrize(
        ("d", "count", "area"),
        [(1, 2, 2.0), (2, 4, 2.0 * math.pi), (3, 26, 4.0 * math.pi)],
    )
    def test_total_mass(self, d: int, count: int, area: float) -> None:
        """Test the number of atoms and the total weight."""
        directions, weights = sphere_design(d)

        assert directions.shape == (count, d)
        assert math.isclose(float(weights.sum()), area, rel_tol=1e-12)

    def test_second_moments_isotropic_in_three_dimensions(self) -> None:
        """Test that the cube design integrates w w^T like the sphere."""
        directions, weights = sphere_design(3)

        matrix = (directions * weights[:, None]).T @ directions

        np.testing.assert_allclose(matrix, 4.0 * math.pi / 3.0 * np.eye(3), atol=1e-12)

    def test_unknown_dimension(self) -> None:
        """Test that only d = 1, 2, 3 are available."""
        with pytest.raises(ParameterError):
            sphere_design(4)


class TestRadialProfile:
    """Test radial densities."""

    def test_power_law_moment(self) -> None:
        """Test the closed-form moment of r^(-1.5) on (0, 1]."""
        profile = RadialProfile.power_law(1.0, 0.5)

        estimate = profile.moment(1.0, 0.0, 1.0)

        assert estimate.converged
        assert math.isclose(estimate.value, 2.0, rel_tol=1e-14)

    def test_divergent_moment_reports_diagnostic(self) -> None:
        """Test that a divergent power moment is flagged."""
        profile = RadialProfile.power_law(1.0, 0.5)

        estimate = profile.moment(0.5, 0.0, 1.0)

        assert math.isinf(estimate.value)
        assert not estimate.converged
        assert "no finite" in estimate.diagnostic

    def test_density_respects_support(self) -> None:
        """Test that the density vanishes outside (floor, cap]."""
        profile = RadialProfile.power_law(2.0, 1.0, floor=0.5, cap=2.0)

        values = profile.density(np.array([0.25, 1.0, 2.0, 4.0]))

        np.testing.assert_allclose(values, [0.0, 2.0, 0.5, 0.0])

    def test_numeric_derivatives_match_power(self) -> None:
        """Test finite-difference derivatives of a tabulated power law."""
        r = np.geomspace(1e-2, 1e2, 41)
        table = RadialProfile.from_table(r, r**-1.5)
        exact = RadialProfile.power_law(1.0, 0.5)
        x = np.array([0.1, 1.0, 10.0])

        numeric = table.derivatives(x)
        closed = exact.derivatives(x)

        for got, want in zip(numeric, closed):
            np.testing.assert_allclose(got, want, rtol=1e-6)

    def test_table_exponent(self) -> None:
        """Test the local exponent of a tabulated density."""
        r = np.geomspace(1e-2, 1e2, 41)
        profile = RadialProfile.from_table(r, r**-1.7)

        np.testing.assert_allclose(profile.exponent(np.array([1e-4, 1.0, 1e4])), 0.7)

    def test_rescaled_power_law(self) -> None:
        """Test that R^sigma * pi_R of a stable density is unchanged."""
        profile = RadialProfile.power_law(3.0, 0.5)

        rescaled = profile.rescaled(4.0, 4.0**0.5)

        assert math.isclose(rescaled.coefficient, 3.0, rel_tol=1e-14)

    def test_rescaled_general_density(self) -> None:
        """Test factor * R * rho(R r) for a non-power density."""
        profile = RadialProfile.power_law(1.0, 0.5).multiplied(
            lambda r: np.exp(-r), "exp"
        )

        rescaled = profile.rescaled(2.0, 3.0)

        value = float(rescaled.density(np.array([0.5]))[0])
        assert math.isclose(value, 3.0 * 2.0 * math.exp(-1.0), rel_tol=1e-14)

    def test_empty_support(self) -> None:
        """Test that cap <= floor is refused."""
        with pytest.raises(MeasureValidationError):
            RadialProfile.power_law(1.0, 0.5, floor=1.0, cap=1.0)


class TestLevyMeasure:
    """Test measure construction and validation."""

    def test_stable_measure_fields(self) -> None:
        """Test a one-dimensional stable measure."""
        pi = stable_measure(0.5, 1)

        assert pi.kind is MeasureKind.STABLE_RADIAL
        assert pi.compensator == "none"
        assert pi.is_symmetric
        assert not pi.is_zero

    def test_order_out_of_range(self) -> None:
        """Test that sigma must lie in (0, 2)."""
        with pytest.raises(MeasureValidationError):
            stable_measure(2.0, 1)

    def test_non_unit_direction(self) -> None:
        """Test that atoms must be unit vectors."""
        with pytest.raises(MeasureValidationError):
            stable_measure(0.5, 1, atoms=([[1.1]], [1.0]))

    def test_negative_weight(self) -> None:
        """Test that weights must be nonnegative."""
        with pytest.raises(MeasureValidationError):
            stable_measure(0.5, 1, atoms=([[1.0]], [-1.0]))

    def test_asymmetric_order_one(self) -> None:
        """Test that order-1 measures need symmetric atoms."""
        with pytest.raises(MeasureValidationError):
            stable_measure(1.0, 1, atoms=([[1.0]], [1.0]))

    def test_divergent_first_moment(self) -> None:
        """Test that sigma > 1 needs a finite first moment at infinity."""
        profile = RadialProfile.power_law(1.0, 0.9, floor=1.0)

        with pytest.raises(MeasureValidationError):
            radial_angular_measure(1.5, 1, profile)

    def test_compensator_regimes(self) -> None:
        """Test the regime names."""
        assert stable_measure(1.0, 1).compensator == "unit_ball"
        assert stable_measure(1.5, 1).compensator == "full"

    def test_difference_components_are_signed(self) -> None:
        """Test that difference measures expand into signed parts."""
        pi = difference(stable_measure(0.5, 1), stable_measure(0.5, 1, coefficient=0.5))

        signs = [sign for sign, _, _ in pi.signed_components()]

        assert pi.kind is MeasureKind.DIFFERENCE
        assert signs == [1.0, -1.0]


class TestMeasureCalculus:
    """Test operations on measures."""

    def test_scale_measure_self_similar(self) -> None:
        """Test that stable measures are invariant under kappa(R) pi_R."""
        pi = stable_measure(0.5, 1)
        kappa = power_law_triple(0.5)

        for R in (1e-2, 0.3, 1.0, 7.0, 1e2):
            scaled = scale_measure(pi, R, kappa)
            small = radial_moment(scaled, 1.0, 0.0, 1.0).value
            large = radial_moment(scaled, 0.25, 1.0, math.inf).value
            assert math.isclose(small + large, 12.0, rel_tol=1e-12)

    def test_scale_measure_rejects_nonpositive_scale(self) -> None:
        """Test the domain of R."""
        with pytest.raises(ParameterError):
            scale_measure(stable_measure(0.5, 1), 0.0, power_law_triple(0.5))

    def test_truncated_second_moment(self) -> None:
        """Test the second moment of the truncated isotropic stable measure."""
        mu0 = truncate(stable_measure(0.5, 1), 1.0)

        value = radial_moment(mu0, 2.0).value

        assert math.isclose(value, 4.0 / 3.0, rel_tol=1e-14)

    def test_reweight_and_superpose(self) -> None:
        """Test linear combinations of measures."""
        pi = stable_measure(0.5, 1)

        combined = superpose([pi, reweight(pi, 2.0)], [1.0, 1.0])

        assert math.isclose(
            radial_moment(combined, 1.0, 0.0, 1.0).value,
            3.0 * radial_moment(pi, 1.0, 0.0, 1.0).value,
            rel_tol=1e-14,
        )

    def test_moment_of_difference_refused(self) -> None:
        """Test that moments are taken per part."""
        pi = difference(stable_measure(0.5, 1), stable_measure(0.5, 1))

        with pytest.raises(ParameterError):
            radial_moment(pi, 1.0)

    def test_directional_second_moment(self) -> None:
        """Test the small-ball covariance of a two-dimensional design measure."""
        pi = stable_measure(1.0, 2)

        matrix = directional_second_moment(pi)

        np.testing.assert_allclose(matrix, math.pi * np.eye(2), rtol=1e-12)

    def test_directional_density_and_atoms(self) -> None:
        """Test density lookup along an atom and the atom inclusion test."""
        pi = stable_measure(0.5, 2)
        single = stable_measure(0.5, 2, atoms=([[1.0, 0.0]], [1.0]))

        density = directional_density(pi, np.array([1.0, 0.0]), np.array([1.0]))

        assert math.isclose(float(density[0]), 2.0 * math.pi / 4.0)
        assert common_atoms(pi, single)
        assert not common_atoms(single, pi)


class TestEstimateOrder:
    """Test blow-up exponent estimation."""

    def test_stable_order(self) -> None:
        """Test that a stable measure of order 0.7 is recovered."""
        estimate = estimate_order(stable_measure(0.7, 1))

        assert abs(estimate.value - 0.7) <= 1e-3
        assert not estimate.wide_confidence

    def test_finite_measure(self) -> None:
        """Test that a measure without mass near 0 has order 0."""
        pi = stable_measure(0.7, 1, floor=0.1)

        estimate = estimate_order(pi)

        assert estimate.value == 0.0

    def test_bounded_density(self) -> None:
        """Test that a density finite at the origin has order 0, not 2 - 3."""
        r = np.geomspace(1e-10, 50.0, 400)
        pi = radial_angular_measure(0.5, 1, RadialProfile.from_table(r, np.exp(-r)))

        estimate = estimate_order(pi)

        assert estimate.value == 0.0

    def test_non_power_density_is_flagged(self) -> None:
        """Test the wide-confidence flag for oscillating densities."""
        profile = RadialProfile.power_law(1.0, 0.5).multiplied(
            lambda r: np.where(r < 1.0, 2.0 + np.sin(3.0 * np.log(r)), 2.0), "wobble"
        )
        pi = radial_angular_measure(0.5, 1, profile)

        estimate = estimate_order(pi)

        assert estimate.wide_confidence
