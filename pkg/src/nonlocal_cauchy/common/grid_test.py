"""Tests for grid module."""

import math

import numpy as np
import pytest

from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.grid import Field, GridMismatchError, GridSpec, Space


class TestGridSpec:
    """Test grid validation and lattices."""

    def test_spacing_and_nyquist(self) -> None:
        """Test h = L / n and the Nyquist frequency n / (2L)."""
        grid = GridSpec(1, 16, 4.0)

        assert grid.h == 0.25
        assert grid.nyquist == 2.0
        assert grid.axis()[0] == -2.0

    @pytest.mark.parametrize(
        "d,n,L", [(4, 16, 1.0), (1, 12, 1.0), (1, 4, 1.0), (1, 16, 0.0)]
    )
    def test_invalid(self, d: int, n: int, L: float) -> None:
        """Test dimension, power-of-two size and positive period."""
        with pytest.raises(ParameterError):
            GridSpec(d, n, L)

    def test_frequency_points(self) -> None:
        """Test the flattened lattice in FFT order."""
        grid = GridSpec(2, 8, 2.0)

        points = grid.frequency_points()

        assert points.shape == (64, 2)
        np.testing.assert_array_equal(points[1], [0.0, 0.5])

    def test_refined(self) -> None:
        """Test that refinement keeps the period."""
        assert GridSpec(1, 16, 4.0).refined() == GridSpec(1, 32, 4.0)


class TestField:
    """Test transforms, norms and translations."""

    def test_mode_coefficient(self) -> None:
        """Test that exp(2 pi i x / L) has coefficient L at xi = 1 / L."""
        grid = GridSpec(1, 16, 4.0)

        spectrum = Field.mode(grid, (1,)).to_frequency()

        assert spectrum.space is Space.FREQUENCY
        assert abs(spectrum.values[1] - 4.0) <= 1e-12
        assert np.max(np.abs(np.delete(spectrum.values, 1))) <= 1e-12

    def test_round_trip(self) -> None:
        """Test that a real field comes back real and unchanged."""
        grid = GridSpec(1, 32, 8.0)
        f = Field.from_function(grid, lambda x: np.exp(-(x**2)))

        back = f.to_frequency().to_physical()

        assert np.isrealobj(back.values)
        np.testing.assert_allclose(back.values, f.values, atol=1e-14)

    def test_integral_and_norms(self) -> None:
        """Test the integral and L_p norms of a constant."""
        grid = GridSpec(2, 8, 2.0)
        f = Field.constant(grid, 3.0)

        assert f.integral() == pytest.approx(12.0)
        assert f.lp_norm(2.0) == pytest.approx(6.0)
        assert f.lp_norm(math.inf) == 3.0

    def test_norm_exponent(self) -> None:
        """Test that p < 1 is refused."""
        with pytest.raises(ParameterError):
            Field.constant(GridSpec(1, 8, 1.0), 1.0).lp_norm(0.5)

    def test_shifted(self) -> None:
        """Test the exact translate of a band-limited cosine."""
        grid = GridSpec(1, 32, 8.0)
        f = Field.mode(grid, (2,), real=True)

        moved = f.shifted(0.3)

        expected = np.cos(2.0 * math.pi * 2.0 * (grid.axis() + 0.3) / 8.0)
        np.testing.assert_allclose(moved.values, expected, atol=1e-12)

    def test_convolve_mode(self) -> None:
        """Test that e_k * e_k = L e_k on the torus."""
        grid = GridSpec(1, 16, 4.0)
        wave = Field.mode(grid, (1,))

        result = wave.convolve(wave)

        assert result.max_abs_difference(wave.scaled(4.0)) <= 1e-12

    def test_upsampled(self) -> None:
        """Test that the refined grid reproduces the coarse values."""
        grid = GridSpec(1, 16, 4.0)
        f = Field.mode(grid, (3,), amplitude=2.0, phase=0.4, real=True)

        fine = f.upsampled()

        assert fine.grid == grid.refined()
        np.testing.assert_allclose(fine.values[::2], f.values, atol=1e-12)

    def test_interpolate_off_grid(self) -> None:
        """Test the trigonometric interpolant between grid points."""
        grid = GridSpec(1, 16, 4.0)
        f = Field.mode(grid, (1,), real=True)
        points = np.array([0.1, 1.3, -1.7])

        values = f.interpolate(points)

        np.testing.assert_allclose(
            np.real(values), np.cos(2.0 * math.pi * points / 4.0), atol=1e-12
        )

    def test_mismatch(self) -> None:
        """Test that fields on different grids do not add."""
        first = Field.constant(GridSpec(1, 8, 1.0), 1.0)
        second = Field.constant(GridSpec(1, 16, 1.0), 1.0)

        with pytest.raises(GridMismatchError):
            first.plus(second)

    def test_shape_check(self) -> None:
        """Test that values must have the grid shape."""
        with pytest.raises(GridMismatchError):
            Field(GridSpec(1, 8, 1.0), np.zeros(9))
