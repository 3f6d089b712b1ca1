"""Tests for density_kernels module."""

import math

import numpy as np
import pytest

from nonlocal_cauchy.analysis.density_kernels import (
    DensityAliasingError,
    HormanderSample,
    IntegrabilityError,
    choose_c0,
    continuity_audit,
    density,
    density_grid,
    density_moment,
    density_scaling_check,
    embedding_kernel,
    embedding_kernel_audit,
    holder_modulus_audit,
    hormander_audit,
    integrability_check,
    kernel_bound_audit,
    representation_check,
    wrapped_cauchy_density,
)
from nonlocal_cauchy.analysis.levy_measure import LevyMeasure, stable_measure
from nonlocal_cauchy.analysis.scaling import ScalingTriple, power_law_triple
from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.grid import Field, GridSpec


Setup = tuple[LevyMeasure, ScalingTriple, GridSpec]


@pytest.fixture(name="grid")
def fixture_grid() -> GridSpec:
    return GridSpec(1, 256, 16.0)


class TestDensity:
    """Test Fourier inversion of the characteristic function."""

    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_cauchy_oracle(self, grid: GridSpec, t: float) -> None:
        """Test the wrapped Cauchy density with scale pi t."""
        p = density(stable_measure(1.0, 1), t, grid)

        oracle = wrapped_cauchy_density(grid.axis(), math.pi * t, grid.L)
        error = np.max(np.abs(p.values - oracle)) / np.max(oracle)
        assert error <= 1e-4

    def test_mass(self, grid: GridSpec) -> None:
        """Test that densities integrate to one."""
        p = density(stable_measure(1.5, 1), 0.3, grid)

        assert math.isclose(p.integral().real, 1.0, rel_tol=1e-12)

    def test_semigroup(self, grid: GridSpec) -> None:
        """Test p(s + t) = p(s) * p(t)."""
        mu = stable_measure(0.5, 1)

        product = density(mu, 0.4, grid).convolve(density(mu, 0.6, grid))

        whole = density(mu, 1.0, grid)
        gap = np.sum(np.abs(product.values - whole.values)) * grid.cell_volume
        assert gap <= 1e-9

    def test_aliasing_guard(self) -> None:
        """Test that an unresolved short time is refused."""
        with pytest.raises(DensityAliasingError, match="increase the points"):
            density(stable_measure(1.0, 1), 0.01, GridSpec(1, 8, 64.0))

    def test_positive_time(self, grid: GridSpec) -> None:
        """Test that t = 0 is refused."""
        with pytest.raises(ParameterError):
            density(stable_measure(1.0, 1), 0.0, grid)

    def test_grid_choice(self) -> None:
        """Test L = 32 a(1) and the first n with exp(-2 pi^2 nyquist) <= 1e-12."""
        chosen = density_grid(stable_measure(1.0, 1), 1.0, power_law_triple(1.0))

        assert chosen.L == 32.0
        assert chosen.n == 128

    def test_moment_of_order_zero(self, grid: GridSpec) -> None:
        """Test E|Z|^0 = 1."""
        moment = density_moment(stable_measure(1.5, 1), 0.5, 0.0, grid)

        assert math.isclose(moment, 1.0, rel_tol=1e-12)

    def test_one_sided_stable(self) -> None:
        """Test the wrapped law x^(-3/2) exp(-pi / x) of one-sided order-1/2 jumps."""
        grid = GridSpec(1, 4096, 64.0)
        mu = stable_measure(0.5, 1, atoms=([[1.0]], [1.0]))
        points = np.array([0.5, 1.0, 2.0, 4.0, 8.0])

        p = density(mu, 1.0, grid)

        x = grid.axis()
        assert np.sum(p.values[x > 0]) * grid.h >= 0.75
        shifted = points[:, None] + grid.L * np.arange(200_000)[None, :]
        oracle = np.sum(shifted**-1.5 * np.exp(-math.pi / shifted), axis=1)
        index = np.round((points + grid.L / 2.0) / grid.h).astype(int)
        np.testing.assert_allclose(p.values[index], oracle, atol=1e-4)

    def test_one_sided_compensated(self) -> None:
        """Test that an order-3/2 measure with positive jumps skews the law right."""
        grid = GridSpec(1, 1024, 64.0)
        mu = stable_measure(1.5, 1, atoms=([[1.0]], [1.0]))

        p = density(mu, 1.0, grid)

        x = grid.axis()
        right = np.sum(p.values[x >= 4.0]) * grid.h
        left = np.sum(p.values[x <= -4.0]) * grid.h
        assert right >= 5.0 * left
        assert math.isclose(p.integral().real, 1.0, rel_tol=1e-10)


class TestScaling:
    """Test the self-similarity checks."""

    def test_stable_scaling(self, grid: GridSpec) -> None:
        """Test that a stable density is its own rescaling."""
        report = density_scaling_check(
            stable_measure(1.0, 1), power_law_triple(1.0), [0.5, 1.0, 2.0], grid
        )

        assert report.name == "al1"
        assert report.passed
        assert set(report.details["per_t"]) == {0.5, 1.0, 2.0}

    def test_kernel_time_exponent(self) -> None:
        """Test int |L p(t)| ~ 1/t for an order-3/2 measure."""
        mu = stable_measure(1.5, 1)

        report = kernel_bound_audit(
            mu,
            mu,
            power_law_triple(1.5),
            (0,),
            [0.25, 0.5, 1.0, 2.0],
            [1.0, 2.0, 4.0, 8.0],
            GridSpec(1, 1024, 128.0),
            alpha2=1.5,
        )

        assert abs(report.details["time_slope"] + 1.0) <= 0.05
        assert np.all(np.diff(report.details["tails"]) <= 0.0)
        assert report.value > 0.0

    def test_multi_index_order(self, grid: GridSpec) -> None:
        """Test that derivatives beyond order two are refused."""
        mu = stable_measure(1.5, 1)

        with pytest.raises(ParameterError):
            kernel_bound_audit(
                mu, mu, power_law_triple(1.5), (3,), [1.0, 2.0], [1.0], grid, 1.5
            )

    def test_shift_continuity(self) -> None:
        """Test linear dependence on small shifts."""
        mu = stable_measure(1.5, 1)

        report = continuity_audit(
            mu, mu, power_law_triple(1.5), 1.0, GridSpec(1, 256, 32.0)
        )

        assert report.name == "mvt"
        assert report.passed
        assert report.details["constant"] > 0.0


class TestHormander:
    """Test the space-time kernel integrals."""

    @pytest.fixture(name="setup")
    def fixture_setup(self) -> Setup:
        return stable_measure(1.0, 1), power_law_triple(1.0), GridSpec(1, 64, 16.0)

    def test_choose_c0(self) -> None:
        """Test 3 / C0 < 1 on the 0.01 grid for l(eps) = eps."""
        assert math.isclose(choose_c0(power_law_triple(1.0)), 3.01, rel_tol=1e-12)

    def test_zero_shift(self, setup: Setup) -> None:
        """Test that an unshifted kernel has no difference."""
        mu, kappa, grid = setup

        report = hormander_audit(
            mu, mu, kappa, 1.0, [HormanderSample(0.0, (0.0,), 0.5)], grid
        )

        assert report.value == 0.0

    def test_damping(self, setup: Setup) -> None:
        """Test that a larger lambda lowers the integral."""
        mu, kappa, grid = setup
        sample = HormanderSample(0.0, (0.25,), 0.5)

        undamped = hormander_audit(mu, mu, kappa, 0.0, [sample], grid)
        damped = hormander_audit(mu, mu, kappa, 10.0, [sample], grid)

        assert 0.0 < damped.value <= undamped.value
        assert damped.passed

    def test_inadmissible_sample(self, setup: Setup) -> None:
        """Test that |y| > delta is refused."""
        mu, kappa, grid = setup

        with pytest.raises(ParameterError):
            hormander_audit(
                mu, mu, kappa, 1.0, [HormanderSample(0.0, (1.0,), 0.5)], grid
            )


class TestEmbeddingKernel:
    """Test the time-integrated difference kernel."""

    def test_small_time_divergence(self) -> None:
        """Test d (1 - 1/q) >= delta theta for theta = 1, delta = 1/2, q = 3."""
        report = integrability_check(power_law_triple(1.0), 0.5, 1, 3.0)

        assert not report.passed
        assert "small-time" in report.diagnostic

    def test_integrable(self) -> None:
        """Test q = 3/2, where both time integrals converge."""
        report = integrability_check(power_law_triple(1.0), 0.5, 1, 1.5)

        assert report.passed
        assert math.isfinite(report.value)

    def test_kernel_refuses_divergent_bound(self, grid: GridSpec) -> None:
        """Test the integrability precheck."""
        with pytest.raises(IntegrabilityError):
            embedding_kernel(
                stable_measure(1.0, 1),
                0.5,
                [1.0],
                grid,
                kappa=power_law_triple(1.0),
                q=3.0,
            )

    def test_audit_reports_divergence(self, grid: GridSpec) -> None:
        """Test that the kernel audit fails instead of raising."""
        report = embedding_kernel_audit(
            stable_measure(1.0, 1), power_law_triple(1.0), 0.5, 3.0, [0.5], grid
        )

        assert report.name == "crl1"
        assert not report.passed

    def test_kernel_has_zero_mean(self, grid: GridSpec) -> None:
        """Test that the kernel integrates to zero."""
        kernel = embedding_kernel(stable_measure(1.0, 1), 0.5, [0.5], grid)

        assert abs(kernel.integral()) <= 1e-10

    @pytest.mark.parametrize("delta", [1.0, 0.5])
    def test_representation(self, delta: float) -> None:
        """Test f(x + z) - f(x) as a kernel integral of the fractional operator."""
        grid = GridSpec(1, 64, 8.0)
        f = Field.mode(grid, (2,), real=True)

        report = representation_check(stable_measure(1.0, 1), delta, [0.5], f)

        assert report.name == "kl1"
        assert report.passed
        assert math.isclose(report.details["c"], 1.0 / math.gamma(delta))

    @pytest.mark.parametrize("sigma", [0.5, 1.5])
    def test_representation_one_sided(self, sigma: float) -> None:
        """Test c = 1 at delta = 1 for a measure with positive jumps only."""
        grid = GridSpec(1, 64, 8.0)
        pi = stable_measure(sigma, 1, atoms=([[1.0]], [1.0]))
        f = Field.mode(grid, (2,), real=True)

        report = representation_check(pi, 1.0, [0.5], f)

        assert report.passed
        assert report.details["c"] == 1.0

    def test_fractional_needs_symmetry(self) -> None:
        """Test that a one-sided measure is refused below delta = 1."""
        grid = GridSpec(1, 64, 8.0)
        pi = stable_measure(0.5, 1, atoms=([[1.0]], [1.0]))

        with pytest.raises(ParameterError):
            representation_check(pi, 0.5, [0.5], Field.mode(grid, (1,), real=True))


class TestHolderModulus:
    """Test the oscillation audits."""

    def test_constant(self) -> None:
        """Test that constants have zero modulus."""
        grid = GridSpec(1, 64, 8.0)

        reports = holder_modulus_audit(
            stable_measure(0.5, 1),
            power_law_triple(0.5),
            Field.constant(grid, 1.0),
            [0.1, 0.2],
        )

        assert [r.name for r in reports] == ["ccc1", "pro4"]
        assert reports[0].passed
        assert reports[0].value == 0.0

    def test_homogeneity(self) -> None:
        """Test that doubling f leaves the fitted constants unchanged."""
        grid = GridSpec(1, 64, 8.0)
        f = Field.mode(grid, (1,), real=True)
        pi = stable_measure(0.5, 1)
        kappa = power_law_triple(0.5)

        single = holder_modulus_audit(pi, kappa, f, [0.1, 0.2, 0.4])
        double = holder_modulus_audit(pi, kappa, f.scaled(2.0), [0.1, 0.2, 0.4])

        assert single[0].passed
        assert math.isclose(single[0].value, double[0].value, rel_tol=1e-10)
        assert math.isclose(single[1].value, double[1].value, rel_tol=1e-10)
