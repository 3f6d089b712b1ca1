"""Periodic uniform grids and fields sampled on them.

The whole space is replaced by a torus of period L per axis with grid points
x_j = -L/2 + j*h, h = L/n. Frequency-space values are continuous Fourier
coefficients, f_hat(xi_k) ~ integral of f(x) exp(-i 2 pi xi_k . x) dx over
the torus, so that multiplying coefficients realizes convolution and
multiplying by a symbol realizes the corresponding operator. Frequencies
come in FFT order, xi_k = k/L with k in [-n/2, n/2).
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import numpy.typing as npt
from scipy import fft

from nonlocal_cauchy.common.errors import ParameterError

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

MAX_DIMENSION = 3
_INTERPOLATION_CHUNK = 4_000_000


class GridMismatchError(ParameterError):
    """Raised when two objects living on different grids are combined."""


class Space(str, Enum):
    """Representation of a field's values."""

    PHYSICAL = "physical"
    FREQUENCY = "frequency"


@dataclass(frozen=True)
class GridSpec:
    """A d-dimensional periodic grid with n points per axis and period L."""

    d: int
    n: int
    L: float

    def __post_init__(self) -> None:
        if not 1 <= self.d <= MAX_DIMENSION:
            raise ParameterError(
                f"grid dimension must be 1..{MAX_DIMENSION}, got {self.d}"
            )
        if self.n < 8 or self.n & (self.n - 1):
            raise ParameterError(
                f"points per axis must be a power of two >= 8, got {self.n}"
            )
        if not self.L > 0:
            raise ParameterError(f"period length must be positive, got {self.L}")

    @property
    def h(self) -> float:
        """Grid spacing."""
        return self.L / self.n

    @property
    def nyquist(self) -> float:
        """Nyquist frequency n / (2L)."""
        return self.n / (2.0 * self.L)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    def axis(self) -> FloatArray:
        """Physical coordinates along one axis."""
        return -0.5 * self.L + self.h * np.arange(self.n)

    def frequency_axis(self) -> FloatArray:
        """Frequencies along one axis, FFT order."""
        return fft.fftfreq(self.n, d=self.h)

    @cached_property
    def coordinates(self) -> tuple[FloatArray, ...]:
        axis = self.axis()
        return tuple(np.meshgrid(*([axis] * self.d), indexing="ij"))

    @cached_property
    def frequencies(self) -> tuple[FloatArray, ...]:
        axis = self.frequency_axis()
        return tuple(np.meshgrid(*([axis] * self.d), indexing="ij"))

    @cached_property
    def frequency_radius(self) -> FloatArray:
        """|xi| on the frequency lattice."""
        return np.sqrt(sum(xi**2 for xi in self.frequencies))

    @cached_property
    def phase(self) -> FloatArray:
        """exp(-i 2 pi xi_k x_0) for x_0 = -L/2, which is (-1)^(k_1 + ... + k_d)."""
        k = np.rint(self.frequency_axis() * self.L).astype(np.int64)
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        grids = np.meshgrid(*([sign] * self.d), indexing="ij")
        return np.prod(np.stack(grids), axis=0)

    def frequency_points(self) -> FloatArray:
        """Lattice frequencies as an array of shape (n^d, d)."""
        return np.stack([xi.ravel() for xi in self.frequencies], axis=-1)

    def nyquist_mask(self) -> npt.NDArray[np.bool_]:
        """Frequencies on the boundary of the resolved box."""
        top = self.nyquist * (1.0 - 1e-12)
        return np.any(np.stack([np.abs(xi) >= top for xi in self.frequencies]), axis=0)

    def refined(self) -> "GridSpec":
        """Same torus with twice the points per axis."""
        return GridSpec(self.d, 2 * self.n, self.L)

    def with_period(self, L: float) -> "GridSpec":
        return GridSpec(self.d, self.n, L)


def require_same_grid(first: GridSpec, second: GridSpec) -> None:
    """Raise GridMismatchError unless both grids are identical."""
    if first != second:
        raise GridMismatchError(f"grid mismatch: {first} vs {second}")


@dataclass(frozen=True, eq=False)
class Field:
    """Values of a function on a grid, in physical or frequency representation."""

    grid: GridSpec
    values: npt.NDArray[np.generic]
    space: Space = Space.PHYSICAL
    real: bool = field(default=True)

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise GridMismatchError(
                f"values of shape {self.values.shape} "
                f"do not match grid {self.grid.shape}"
            )

    @classmethod
    def from_values(cls, grid: GridSpec, values: npt.ArrayLike) -> "Field":
        """Wrap physical-space values; the field is real when the array is."""
        array = np.asarray(values)
        return cls(grid, array.reshape(grid.shape), Space.PHYSICAL, np.isrealobj(array))

    @classmethod
    def from_function(
        cls, grid: GridSpec, func: Callable[..., npt.ArrayLike]
    ) -> "Field":
        """Sample func(x_1, ..., x_d) on the grid."""
        return cls.from_values(grid, func(*grid.coordinates))

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "Field":
        return cls.from_values(grid, np.full(grid.shape, float(value)))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Field":
        return cls.constant(grid, 0.0)

    @classmethod
    def mode(
        cls,
        grid: GridSpec,
        index: tuple[int, ...],
        amplitude: float = 1.0,
        phase: float = 0.0,
        real: bool = False,
    ) -> "Field":
        """
        A single lattice Fourier mode.

        Args:
            grid: Target grid
            index: Integer lattice index k, frequency k / L
            amplitude: Mode amplitude
            phase: Phase offset in radians
            real: Return amplitude * cos(...) instead of the complex exponential

        Returns:
            Physical-space field
        """
        if len(index) != grid.d:
            raise ParameterError(f"mode index {index} does not have {grid.d} entries")
        argument = phase + sum(
            2.0 * math.pi * k / grid.L * x for k, x in zip(index, grid.coordinates)
        )
        if real:
            return cls.from_values(grid, amplitude * np.cos(argument))
        return cls.from_values(grid, amplitude * np.exp(1j * argument))

    def to_frequency(self) -> "Field":
        """Continuous Fourier coefficients of the field."""
        if self.space is Space.FREQUENCY:
            return self
        coefficients = fft.fftn(self.values) * self.grid.cell_volume * self.grid.phase
        return Field(self.grid, coefficients, Space.FREQUENCY, self.real)

    def to_physical(self) -> "Field":
        """Grid values of the field; real fields drop the imaginary roundoff."""
        if self.space is Space.PHYSICAL:
            return self
        values = fft.ifftn(self.values * self.grid.phase) / self.grid.cell_volume
        if self.real:
            values = values.real
        return Field(self.grid, values, Space.PHYSICAL, self.real)

    def with_values(
        self, values: npt.ArrayLike, real: Optional[bool] = None
    ) -> "Field":
        """New field on the same grid and in the same representation."""
        keep = self.real if real is None else real
        array = np.asarray(values).reshape(self.grid.shape)
        return Field(self.grid, array, self.space, keep)

    def scaled(self, factor: complex) -> "Field":
        return self.with_values(self.values * factor)

    def plus(self, other: "Field", factor: float = 1.0) -> "Field":
        """self + factor * other, in the representation of self."""
        require_same_grid(self.grid, other.grid)
        if self.space is Space.FREQUENCY:
            other = other.to_frequency()
        else:
            other = other.to_physical()
        total = self.values + factor * other.values
        return self.with_values(total, self.real and other.real)

    def lp_norm(self, p: float) -> float:
        """
        L_p norm over the torus as a cell-volume Riemann sum.

        Args:
            p: Exponent in [1, infinity]

        Returns:
            The norm
        """
        values = np.abs(self.to_physical().values)
        if math.isinf(p):
            return float(values.max())
        if p < 1:
            raise ParameterError(f"L_p norm needs p >= 1, got {p}")
        return float((np.sum(values**p) * self.grid.cell_volume) ** (1.0 / p))

    def integral(self) -> complex:
        """Integral over the torus (the zero Fourier coefficient)."""
        total = np.sum(self.to_physical().values) * self.grid.cell_volume
        return complex(total)

    def max_abs_difference(self, other: "Field") -> float:
        require_same_grid(self.grid, other.grid)
        diff = self.to_physical().values - other.to_physical().values
        return float(np.max(np.abs(diff)))

    def shifted(self, z: npt.ArrayLike) -> "Field":
        """The translate x -> f(x + z), exact for band-limited data."""
        shift = np.atleast_1d(np.asarray(z, dtype=float))
        if shift.shape != (self.grid.d,):
            raise ParameterError(f"shift {shift} does not have {self.grid.d} entries")
        spectrum = self.to_frequency()
        argument = sum(
            2.0 * math.pi * xi * s for xi, s in zip(self.grid.frequencies, shift)
        )
        moved = spectrum.with_values(spectrum.values * np.exp(1j * argument))
        return moved.to_physical()

    def convolve(self, other: "Field") -> "Field":
        """Periodic convolution (f * g)(x) = integral of f(x - y) g(y) dy."""
        require_same_grid(self.grid, other.grid)
        first = self.to_frequency()
        second = other.to_frequency()
        product = first.with_values(
            first.values * second.values, self.real and other.real
        )
        return product.to_physical()

    def upsampled(self) -> "Field":
        """The same band-limited function on the refined grid (zero-padded spectrum)."""
        fine = self.grid.refined()
        spectrum = self.to_frequency().values
        k = np.rint(self.grid.frequency_axis() * self.grid.L).astype(np.int64) % fine.n
        padded = np.zeros(fine.shape, dtype=complex)
        padded[np.ix_(*([k] * self.grid.d))] = spectrum
        return Field(fine, padded, Space.FREQUENCY, self.real).to_physical()

    def interpolate(
        self, points: npt.ArrayLike, tolerance: float = 1e-13
    ) -> npt.NDArray[np.generic]:
        """
        Evaluate the trigonometric interpolant at arbitrary points.

        Only coefficients above ``tolerance`` times the largest one take part,
        which keeps evaluation cheap for band-limited data.

        Args:
            points: Array of shape (m, d) (or (m,) in one dimension)
            tolerance: Relative cut-off for significant coefficients

        Returns:
            Interpolated values of shape (m,)
        """
        x = np.asarray(points, dtype=float)
        if x.ndim == 1 and self.grid.d == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[1] != self.grid.d:
            raise ParameterError(f"points must have shape (m, {self.grid.d})")
        spectrum = self.to_frequency().values.ravel()
        scale = np.abs(spectrum).max(initial=0.0)
        keep = np.abs(spectrum) > tolerance * scale
        coefficients = spectrum[keep] / self.grid.L**self.grid.d
        modes = self.grid.frequency_points()[keep]
        result = np.zeros(x.shape[0], dtype=complex)
        if coefficients.size == 0:
            return result.real if self.real else result
        chunk = max(1, _INTERPOLATION_CHUNK // coefficients.size)
        for start in range(0, x.shape[0], chunk):
            block = x[start : start + chunk]
            result[start : start + chunk] = np.exp(
                2j * math.pi * block @ modes.T
            ) @ coefficients
        return result.real if self.real else result
