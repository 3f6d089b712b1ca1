"""Tests for symbol_calculus module."""

import math
from pathlib import Path

import numpy as np
import pytest

from nonlocal_cauchy.analysis.levy_measure import reweight, stable_measure
from nonlocal_cauchy.analysis.symbol_calculus import (
    CACHE_ENTRIES,
    DegenerateComparatorError,
    SpectralMultiplier,
    apply_multiplier,
    bessel_multiplier,
    cache_len,
    check_comparability,
    clear_cache,
    continuity_ratio_audit,
    evaluate_symbol,
    fractional_multiplier,
    load_multiplier,
    nonlocal_quadrature,
    save_multiplier,
    stable_constant,
    symbol,
    symbol_sym,
)
from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.grid import Field, GridSpec


@pytest.fixture(name="cauchy_grid")
def fixture_cauchy_grid() -> GridSpec:
    return GridSpec(1, 256, 16.0)


class TestSymbol:
    """Test symbol tabulation."""

    def test_cauchy_oracle(self, cauchy_grid: GridSpec) -> None:
        """Test psi = -2 pi^2 |xi| for dy/|y|^2 on |xi| <= 8."""
        xi = np.abs(cauchy_grid.frequency_axis())

        psi = symbol(stable_measure(1.0, 1), cauchy_grid).values

        np.testing.assert_allclose(psi.real[1:], -2.0 * math.pi**2 * xi[1:], rtol=1e-4)
        assert psi[0] == 0.0
        assert np.all(psi.imag == 0.0)

    def test_symmetric_measure_is_real(self, cauchy_grid: GridSpec) -> None:
        """Test that the odd part cancels for symmetric atoms."""
        psi = symbol(stable_measure(0.5, 1), cauchy_grid).values

        assert np.max(np.abs(psi.imag)) <= 1e-12 * np.max(np.abs(psi))

    def test_one_sided_stable(self) -> None:
        """Test Gamma(-1/2) (-i 2 pi)^(1/2) = 2 pi (-1 + i) for a single atom."""
        pi = stable_measure(0.5, 1, atoms=([[1.0]], [1.0]))

        psi = evaluate_symbol(pi, np.array([1.0]))

        np.testing.assert_allclose(psi, [2.0 * math.pi * (-1.0 + 1.0j)], rtol=1e-6)

    def test_full_compensator_is_real_for_symmetric_atoms(self) -> None:
        """Test an order-3/2 symbol against c |xi|^(3/2)."""
        pi = stable_measure(1.5, 1)

        psi = evaluate_symbol(pi, np.array([1.0, 2.0]))

        assert math.isclose(psi[1].real / psi[0].real, 2.0**1.5, rel_tol=1e-6)
        assert psi[0].real < 0.0

    def test_scaling_identity(self) -> None:
        """Test psi(xi) t = psi(a(t) xi) for a self-similar measure with a(t) = t^2."""
        pi = stable_measure(0.5, 1)
        xi = np.array([0.3, 1.0, 2.5])

        for t in (0.1, 1.0, 10.0):
            left = evaluate_symbol(pi, xi) * t
            right = evaluate_symbol(pi, xi * t**2)
            np.testing.assert_allclose(left, right, rtol=1e-6)

    def test_symbol_sym_is_real_part(self) -> None:
        """Test Re psi = psi of the symmetrization, and that it is nonpositive."""
        pi = stable_measure(0.5, 1, atoms=([[1.0]], [1.0]))
        grid = GridSpec(1, 64, 8.0)

        full = symbol(pi, grid).values
        sym = symbol_sym(pi, grid).values

        np.testing.assert_allclose(sym.real, full.real, rtol=1e-12, atol=0.0)
        assert np.all(sym.real <= 0.0)

    def test_cached(self, cauchy_grid: GridSpec) -> None:
        """Test that repeated requests reuse one multiplier."""
        pi = stable_measure(1.0, 1)

        assert symbol(pi, cauchy_grid) is symbol(pi, cauchy_grid)

    def test_cache_is_bounded(self) -> None:
        """Test that the least recently used multipliers are evicted."""
        grid = GridSpec(1, 8, 1.0)
        count = CACHE_ENTRIES + 8
        measures = [stable_measure(0.5, 1, coefficient=1.0 + k) for k in range(count)]
        clear_cache()
        first = symbol(measures[0], grid)

        for pi in measures[1:]:
            symbol(pi, grid)

        assert cache_len() == CACHE_ENTRIES
        assert symbol(measures[-1], grid) is symbol(measures[-1], grid)
        assert symbol(measures[0], grid) is not first

    def test_dimension_mismatch(self, cauchy_grid: GridSpec) -> None:
        """Test that the grid must live in the measure's dimension."""
        with pytest.raises(ParameterError):
            symbol(stable_measure(1.0, 2), cauchy_grid)

    def test_stable_constant(self) -> None:
        """Test c(1, 1) = pi."""
        assert math.isclose(stable_constant(1.0, 1), math.pi, rel_tol=1e-6)


class TestComparability:
    """Test symbol comparison."""

    def test_same_measure(self, cauchy_grid: GridSpec) -> None:
        """Test (1, 1) for identical measures."""
        pi = stable_measure(1.0, 1)

        assert check_comparability(pi, pi, cauchy_grid) == (1.0, 1.0)

    def test_tripled_weights(self, cauchy_grid: GridSpec) -> None:
        """Test linearity of psi in the measure."""
        mu = stable_measure(0.5, 1)

        c1, c2 = check_comparability(reweight(mu, 3.0), mu, cauchy_grid)

        assert math.isclose(c1, 3.0, rel_tol=1e-10)
        assert math.isclose(c2, 3.0, rel_tol=1e-10)

    def test_degenerate_comparator(self) -> None:
        """Test that a single-direction comparator vanishes off its axis."""
        grid = GridSpec(2, 8, 4.0)
        pi = stable_measure(0.5, 2)
        mu = stable_measure(0.5, 2, atoms=([[1.0, 0.0]], [1.0]))

        with pytest.raises(DegenerateComparatorError):
            check_comparability(pi, mu, grid)


class TestMultipliers:
    """Test multiplier application and derived multipliers."""

    def test_identity(self, cauchy_grid: GridSpec) -> None:
        """Test that the unit multiplier leaves fields unchanged."""
        f = Field.from_function(cauchy_grid, lambda x: np.exp(-(x**2)))
        one = SpectralMultiplier(cauchy_grid, np.ones(cauchy_grid.shape, complex), "1")

        result = apply_multiplier(one, f)

        assert result.max_abs_difference(f) <= 1e-12

    def test_single_mode(self, cauchy_grid: GridSpec) -> None:
        """Test the diagonal action on a lattice mode."""
        m = symbol(stable_measure(1.0, 1), cauchy_grid)
        g = Field.mode(cauchy_grid, (3,))
        expected = complex(m.values[3])

        result = apply_multiplier(m, g)

        oracle = -2.0 * math.pi**2 * 3.0 / cauchy_grid.L
        assert math.isclose(expected.real, oracle, rel_tol=1e-4)
        assert result.max_abs_difference(g.scaled(expected)) <= 1e-10 * abs(expected)

    def test_bessel_inverse_pair(self, cauchy_grid: GridSpec) -> None:
        """Test J^s J^(-s) = identity."""
        mu = stable_measure(1.0, 1)
        f = Field.from_function(
            cauchy_grid, lambda x: np.exp(-(x**2)) * np.cos(3.0 * x)
        )

        forward = apply_multiplier(bessel_multiplier(mu, 1.5, cauchy_grid), f)
        back = apply_multiplier(bessel_multiplier(mu, -1.5, cauchy_grid), forward)

        assert back.max_abs_difference(f) <= 1e-10

    def test_bessel_orders_zero_and_one(self, cauchy_grid: GridSpec) -> None:
        """Test J^0 = 1 and J^1 = 1 - psi_sym."""
        mu = stable_measure(1.0, 1)

        zero = bessel_multiplier(mu, 0.0, cauchy_grid).values
        one = bessel_multiplier(mu, 1.0, cauchy_grid).values

        np.testing.assert_array_equal(zero, np.ones(cauchy_grid.shape))
        expected = 1.0 - symbol_sym(mu, cauchy_grid).values
        np.testing.assert_allclose(one, expected, rtol=1e-14)

    def test_fractional_half_of_cauchy(self, cauchy_grid: GridSpec) -> None:
        """Test psi^(pi; 1/2) = -(2 pi^2 |xi|)^(1/2)."""
        xi = np.abs(cauchy_grid.frequency_axis())

        values = fractional_multiplier(stable_measure(1.0, 1), 0.5, cauchy_grid).values

        oracle = -np.sqrt(2.0 * math.pi**2 * xi)
        np.testing.assert_allclose(values.real, oracle, rtol=1e-4)
        assert values[0] == 0.0

    def test_fractional_order_one_is_symbol(self, cauchy_grid: GridSpec) -> None:
        """Test that delta = 1 returns the symbol itself."""
        pi = stable_measure(1.0, 1)

        assert fractional_multiplier(pi, 1.0, cauchy_grid) is symbol(pi, cauchy_grid)

    def test_fractional_order_range(self, cauchy_grid: GridSpec) -> None:
        """Test that delta must lie in (0, 1]."""
        with pytest.raises(ParameterError):
            fractional_multiplier(stable_measure(1.0, 1), 1.5, cauchy_grid)

    def test_save_and_load(self, tmp_path: Path, cauchy_grid: GridSpec) -> None:
        """Test the binary multiplier format with its sidecar."""
        m = symbol(stable_measure(1.0, 1), cauchy_grid)

        save_multiplier(m, tmp_path / "psi", "cauchy")
        loaded = load_multiplier(tmp_path / "psi")

        assert loaded.grid == cauchy_grid
        np.testing.assert_array_equal(loaded.values, m.values)
        assert (tmp_path / "psi.json").exists()


class TestDirectQuadrature:
    """Test the spectral operator against direct quadrature."""

    @pytest.mark.parametrize(("sigma", "L"), [(1.5, 64.0), (1.0, 128.0)])
    def test_gaussian_bump(self, sigma: float, L: float) -> None:
        """Test L^pi exp(-x^2) at 16 probes, relative to the largest value."""
        grid = GridSpec(1, 2048, L)
        pi = stable_measure(sigma, 1)
        probes = np.linspace(-2.0, 2.0, 16)

        def bump(x: np.ndarray) -> np.ndarray:
            return np.exp(-np.sum(x**2, axis=-1))

        def bump_grad(x: np.ndarray) -> np.ndarray:
            return -2.0 * x * bump(x)[:, None]

        spectral = apply_multiplier(
            symbol(pi, grid), Field.from_function(grid, lambda x: np.exp(-(x**2)))
        ).interpolate(probes)
        direct = nonlocal_quadrature(pi, bump, bump_grad, probes)

        assert np.max(np.abs(spectral - direct)) <= 1e-3 * np.max(np.abs(direct))


class TestContinuityAudit:
    """Test the operator continuity ratio audit."""

    def test_doubled_measure(self) -> None:
        """Test that pi = 2 mu gives the constant 2 on both grids."""
        grid = GridSpec(1, 64, 8.0)
        mu = stable_measure(1.0, 1)
        corpus = [
            Field.mode(grid, (2,), real=True),
            Field.from_function(grid, lambda x: np.sin(2.0 * math.pi * x / 8.0) ** 3),
        ]

        report = continuity_ratio_audit(reweight(mu, 2.0), mu, corpus, 2.0)

        assert report.passed
        assert math.isclose(report.value, 2.0, rel_tol=1e-10)
