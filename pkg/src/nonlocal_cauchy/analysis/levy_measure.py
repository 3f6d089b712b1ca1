"""Levy measures in radial-angular form.

A measure is a finite sum of angular components. Each component puts
weights s_i on unit directions w_i and shares one radial density rho(r), so

    pi(dy) = sum_i s_i delta_{w_i}(dw) rho(r) dr,    y = r w.

The compensator regime follows the order sigma: none for sigma < 1, the unit
ball for sigma = 1 and the whole space for sigma > 1.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Optional, Sequence

import numpy as np
import numpy.typing as npt
from scipy import interpolate

from nonlocal_cauchy.analysis.scaling import ScalingTriple
from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.quadrature import (
    MomentEstimate,
    log_slope,
    loglog_fit,
    power_law_integral,
    power_segment,
)

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
RadialFunction = Callable[[FloatArray], FloatArray]
AFactor = Callable[[FloatArray, FloatArray], FloatArray]

UNIT_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-12
DERIVATIVE_STEP = 1e-3
ORDER_SHELLS = np.geomspace(1e-8, 1e-4, 17)
ORDER_RESIDUAL_LIMIT = 1e-3


class MeasureKind(str, Enum):
    STABLE_RADIAL = "stable_radial"
    BERNSTEIN_SUBORDINATED = "bernstein_subordinated"
    RADIAL_ANGULAR_DENSITY = "radial_angular_density"
    DIFFERENCE = "difference"


class MeasureValidationError(ParameterError):
    """Raised when a measure violates the Levy-measure invariants."""


class MeasureMismatchError(ParameterError):
    """Raised when two measures must share angular atoms but do not."""


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """
    Radial density rho(r) on the support (floor, cap].

    ``base`` is the smooth function the density agrees with on its support;
    derivatives and local exponents are taken from it so that one-sided
    values at a cut-off are available. ``power`` marks the closed form
    coefficient * r^(-1-power), which switches moments to exact formulas.
    """

    base: RadialFunction
    label: str
    power: Optional[float] = None
    coefficient: float = 1.0
    floor: float = 0.0
    cap: float = math.inf

    def __post_init__(self) -> None:
        if self.floor < 0 or not self.cap > self.floor:
            raise MeasureValidationError(
                f"radial support ({self.floor}, {self.cap}] is empty or negative"
            )

    @classmethod
    def power_law(
        cls, coefficient: float, beta: float, floor: float = 0.0, cap: float = math.inf
    ) -> "RadialProfile":
        """coefficient * r^(-1-beta) restricted to (floor, cap]."""

        def base(r: FloatArray) -> FloatArray:
            return coefficient * np.asarray(r, dtype=float) ** (-1.0 - beta)

        return cls(
            base=base,
            label=f"power(c={coefficient!r},beta={beta!r})",
            power=beta,
            coefficient=coefficient,
            floor=floor,
            cap=cap,
        )

    @classmethod
    def from_table(
        cls, r_table: npt.ArrayLike, density_table: npt.ArrayLike, label: str = "table"
    ) -> "RadialProfile":
        """Log-log cubic spline of a positive table, extended by its end slopes."""
        r = np.asarray(r_table, dtype=float)
        rho = np.asarray(density_table, dtype=float)
        if r.ndim != 1 or r.size < 2 or r.shape != rho.shape:
            raise MeasureValidationError("radial table needs matching 1-d arrays")
        if np.any(np.diff(r) <= 0) or np.any(rho <= 0):
            raise MeasureValidationError(
                "radial table must be increasing in r and positive"
            )
        log_r = np.log(r)
        log_rho = np.log(rho)
        spline = interpolate.CubicSpline(log_r, log_rho)
        low = float(spline(log_r[0], 1))
        high = float(spline(log_r[-1], 1))

        def base(x: FloatArray) -> FloatArray:
            lx = np.log(np.asarray(x, dtype=float))
            inner = spline(np.clip(lx, log_r[0], log_r[-1]))
            below = log_rho[0] + low * (lx - log_r[0])
            above = log_rho[-1] + high * (lx - log_r[-1])
            outer = np.where(lx > log_r[-1], above, inner)
            return np.exp(np.where(lx < log_r[0], below, outer))

        digest = hashlib.sha256(r.tobytes() + rho.tobytes()).hexdigest()[:12]
        return cls(base=base, label=f"{label}({digest})")

    def density(self, r: npt.ArrayLike) -> FloatArray:
        """rho(r), zero outside the support."""
        x = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            values = np.asarray(self.base(np.where(x > 0, x, 1.0)), dtype=float)
        return np.where((x > self.floor) & (x <= self.cap), values, 0.0)

    def exponent(self, r: npt.ArrayLike) -> FloatArray:
        """Local beta with rho ~ r^(-1-beta)."""
        x = np.asarray(r, dtype=float)
        if self.power is not None:
            return np.full_like(x, self.power)
        return -1.0 - log_slope(self.base, x, DERIVATIVE_STEP)

    def derivatives(
        self, r: npt.ArrayLike
    ) -> tuple[FloatArray, FloatArray, FloatArray]:
        """rho, rho' and rho'' of the smooth base at r."""
        x = np.asarray(r, dtype=float)
        if self.power is not None:
            rho = self.base(x)
            k = 1.0 + self.power
            return rho, -k * rho / x, k * (k + 1.0) * rho / x**2
        h = DERIVATIVE_STEP
        up = self.base(x * math.exp(h))
        mid = self.base(x)
        down = self.base(x * math.exp(-h))
        first = (up - down) / (2.0 * h)
        second = (up - 2.0 * mid + down) / h**2
        return mid, first / x, (second - first) / x**2

    def moment(
        self, alpha: float, lo: float = 0.0, hi: float = math.inf
    ) -> MomentEstimate:
        """Integral of r^alpha rho(r) over (lo, hi] intersected with the support."""
        a = max(lo, self.floor)
        b = min(hi, self.cap)
        if b <= a:
            return MomentEstimate(0.0, True)
        if self.power is not None:
            value = power_segment(1.0, self.coefficient, self.power, alpha, a, b)
            if math.isinf(value):
                return MomentEstimate(
                    math.inf,
                    False,
                    f"power density r^(-1-{self.power:.6g}) has no finite "
                    f"moment {alpha:.6g} on ({a:.3g}, {b:.3g}]",
                )
            return MomentEstimate(value, True)
        return power_law_integral(self.density, alpha, a, b, exponent=self.exponent)

    def rescaled(self, R: float, factor: float) -> "RadialProfile":
        """Density of factor * (pushforward under y -> y/R): factor * R * rho(R r)."""
        if self.power is not None:
            coefficient = factor * self.coefficient * R ** (-self.power)
            beta = self.power

            def power_base(r: FloatArray) -> FloatArray:
                return coefficient * np.asarray(r, dtype=float) ** (-1.0 - beta)

            return RadialProfile(
                base=power_base,
                label=f"{self.label}|R={R!r},k={factor!r}",
                power=beta,
                coefficient=coefficient,
                floor=self.floor / R,
                cap=self.cap / R,
            )
        inner = self.base

        def base(r: FloatArray) -> FloatArray:
            return factor * R * inner(R * np.asarray(r, dtype=float))

        return RadialProfile(
            base=base,
            label=f"{self.label}|R={R!r},k={factor!r}",
            floor=self.floor / R,
            cap=self.cap / R,
        )

    def restricted(self, floor: float = 0.0, cap: float = math.inf) -> "RadialProfile":
        """Same density on the intersection of the supports."""
        return RadialProfile(
            base=self.base,
            label=f"{self.label}|({max(floor, self.floor)!r},{min(cap, self.cap)!r}]",
            power=self.power,
            coefficient=self.coefficient,
            floor=max(floor, self.floor),
            cap=min(cap, self.cap),
        )

    def multiplied(self, factor: RadialFunction, label: str) -> "RadialProfile":
        """Density times a bounded radial factor (the closed form is dropped)."""
        inner = self.base

        def base(r: FloatArray) -> FloatArray:
            return inner(r) * factor(r)

        return RadialProfile(
            base=base, label=f"{self.label}*{label}", floor=self.floor, cap=self.cap
        )


@dataclass(frozen=True, eq=False)
class AngularComponent:
    """Weighted unit directions sharing one radial profile."""

    directions: FloatArray
    weights: FloatArray
    profile: RadialProfile

    def __post_init__(self) -> None:
        matrix = self.directions.ndim == 2
        if not matrix or self.weights.shape != (self.directions.shape[0],):
            raise MeasureValidationError("directions must be (m, d) with m weights")
        norms = np.linalg.norm(self.directions, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOLERANCE):
            raise MeasureValidationError("angular atoms must be unit vectors to 1e-12")
        if np.any(self.weights < 0):
            raise MeasureValidationError("angular weights must be nonnegative")

    def is_symmetric(self) -> bool:
        """Every direction w has -w with the same weight."""
        for w, s in zip(self.directions, self.weights):
            close = np.all(np.abs(self.directions + w) <= SYMMETRY_TOLERANCE, axis=1)
            same = np.abs(self.weights - s) <= SYMMETRY_TOLERANCE * max(s, 1.0)
            if not np.any(close & same):
                return False
        return True

    def with_profile(self, profile: RadialProfile) -> "AngularComponent":
        return AngularComponent(self.directions, self.weights, profile)

    def reweighted(self, factor: float) -> "AngularComponent":
        return AngularComponent(self.directions, self.weights * factor, self.profile)


@dataclass(frozen=True, eq=False)
class LevyMeasure:
    """
    A Levy measure of order sigma in radial-angular form.

    Difference measures carry no components of their own; they hold a
    minuend and a subtrahend and are evaluated through signed_components().
    """

    kind: MeasureKind
    sigma: float
    d: int
    components: tuple[AngularComponent, ...]
    key: str
    minuend: Optional["LevyMeasure"] = None
    subtrahend: Optional["LevyMeasure"] = None
    a_factor: Optional[AFactor] = field(default=None)

    def __post_init__(self) -> None:
        if not 0 < self.sigma < 2:
            raise MeasureValidationError(
                f"order sigma must lie in (0, 2), got {self.sigma}"
            )
        if self.kind is MeasureKind.DIFFERENCE:
            if self.minuend is None or self.subtrahend is None:
                raise MeasureValidationError(
                    "difference measures need minuend and subtrahend"
                )
            if self.minuend.d != self.d or self.subtrahend.d != self.d:
                raise MeasureValidationError(
                    "difference parts live in different dimensions"
                )
            return
        for component in self.components:
            if component.directions.shape[1] != self.d:
                raise MeasureValidationError(
                    f"angular atoms have dimension {component.directions.shape[1]}, "
                    f"measure has {self.d}"
                )
        _check_integrability(self)

    @property
    def compensator(self) -> str:
        """Compensator regime: 'none', 'unit_ball' or 'full'."""
        if self.sigma < 1:
            return "none"
        if self.sigma == 1:
            return "unit_ball"
        return "full"

    @property
    def is_zero(self) -> bool:
        if self.kind is MeasureKind.DIFFERENCE:
            assert self.minuend is not None and self.subtrahend is not None
            return self.minuend.is_zero and self.subtrahend.is_zero
        return all(not np.any(c.weights > 0) for c in self.components)

    @property
    def is_symmetric(self) -> bool:
        if self.kind is MeasureKind.DIFFERENCE:
            assert self.minuend is not None and self.subtrahend is not None
            return self.minuend.is_symmetric and self.subtrahend.is_symmetric
        return all(c.is_symmetric() for c in self.components)

    def signed_components(
        self,
    ) -> Iterator[tuple[float, "LevyMeasure", AngularComponent]]:
        """Yield (sign, owning measure, component), expanding differences."""
        if self.kind is MeasureKind.DIFFERENCE:
            assert self.minuend is not None and self.subtrahend is not None
            for sign, owner, component in self.minuend.signed_components():
                yield sign, owner, component
            for sign, owner, component in self.subtrahend.signed_components():
                yield -sign, owner, component
            return
        for component in self.components:
            yield 1.0, self, component

    def map_components(
        self, transform: Callable[[AngularComponent], AngularComponent], suffix: str
    ) -> "LevyMeasure":
        """Apply a component transform, recursing through differences."""
        if self.kind is MeasureKind.DIFFERENCE:
            assert self.minuend is not None and self.subtrahend is not None
            return difference(
                self.minuend.map_components(transform, suffix),
                self.subtrahend.map_components(transform, suffix),
            )
        return LevyMeasure(
            kind=self.kind,
            sigma=self.sigma,
            d=self.d,
            components=tuple(transform(c) for c in self.components),
            key=f"{self.key}|{suffix}",
            a_factor=self.a_factor,
        )


def _check_integrability(pi: LevyMeasure) -> None:
    for component in pi.components:
        if not np.any(component.weights > 0):
            continue
        profile = component.profile
        small = profile.moment(2.0, 0.0, 1.0)
        large = profile.moment(0.0, 1.0, math.inf)
        if not (math.isfinite(small.value) and math.isfinite(large.value)):
            raise MeasureValidationError(
                f"integral of min(|y|^2, 1) diverges for {profile.label}: "
                f"{small.diagnostic or large.diagnostic}"
            )
        if pi.sigma > 1:
            first = profile.moment(1.0, 1.0, math.inf)
            if not math.isfinite(first.value):
                raise MeasureValidationError(
                    f"order {pi.sigma} needs a finite first moment at infinity "
                    f"({profile.label})"
                )
    if pi.sigma == 1 and not all(c.is_symmetric() for c in pi.components):
        raise MeasureValidationError(
            "order-1 measures need symmetric angular atoms "
            "(w and -w with equal weights)"
        )


def _atoms_digest(directions: FloatArray, weights: FloatArray) -> str:
    return hashlib.sha256(directions.tobytes() + weights.tobytes()).hexdigest()[:12]


def sphere_design(d: int) -> tuple[FloatArray, FloatArray]:
    """
    Quasi-uniform atoms standing in for the surface measure of the unit sphere.

    d = 1: {+1, -1} with unit weights; d = 2: {+-e1, +-e2} with weights 2 pi / 4;
    d = 3: the 26 face, edge and corner directions of the cube, weighted
    1/21, 4/105 and 27/840 of 4 pi so that quadratic forms integrate exactly.

    Returns:
        Tuple (directions of shape (m, d), weights of shape (m,))
    """
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        directions = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        return directions, np.full(4, 2.0 * math.pi / 4.0)
    if d == 3:
        points = []
        weights = []
        share = {1: 1.0 / 21.0, 2: 4.0 / 105.0, 3: 27.0 / 840.0}
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                for k in (-1, 0, 1):
                    support = abs(i) + abs(j) + abs(k)
                    if support == 0:
                        continue
                    vector = np.array([i, j, k], dtype=float)
                    points.append(vector / np.linalg.norm(vector))
                    weights.append(4.0 * math.pi * share[support])
        return np.array(points), np.array(weights)
    raise ParameterError(f"sphere designs exist for d = 1, 2, 3, got {d}")


def _resolve_atoms(
    d: int, atoms: Optional[tuple[npt.ArrayLike, npt.ArrayLike]]
) -> tuple[FloatArray, FloatArray]:
    if atoms is None:
        return sphere_design(d)
    directions = np.atleast_2d(np.asarray(atoms[0], dtype=float))
    weights = np.atleast_1d(np.asarray(atoms[1], dtype=float))
    return directions, weights


def stable_measure(
    sigma: float,
    d: int,
    coefficient: float = 1.0,
    atoms: Optional[tuple[npt.ArrayLike, npt.ArrayLike]] = None,
    floor: float = 0.0,
    cap: float = math.inf,
) -> LevyMeasure:
    """
    Stable-type measure with radial density coefficient * r^(-1-sigma).

    Args:
        sigma: Order in (0, 2)
        d: Dimension
        coefficient: Radial density coefficient
        atoms: (directions, weights); the sphere design when absent
        floor: Lower radial cut-off (0 for a genuine stable measure)
        cap: Upper radial cut-off

    Returns:
        LevyMeasure of kind STABLE_RADIAL
    """
    directions, weights = _resolve_atoms(d, atoms)
    profile = RadialProfile.power_law(coefficient, sigma, floor=floor, cap=cap)
    key = (
        f"stable(sigma={sigma!r},d={d},c={coefficient!r},floor={floor!r},cap={cap!r},"
        f"atoms={_atoms_digest(directions, weights)})"
    )
    return LevyMeasure(
        kind=MeasureKind.STABLE_RADIAL,
        sigma=sigma,
        d=d,
        components=(AngularComponent(directions, weights, profile),),
        key=key,
    )


def radial_angular_measure(
    sigma: float,
    d: int,
    profile: RadialProfile,
    atoms: Optional[tuple[npt.ArrayLike, npt.ArrayLike]] = None,
    kind: MeasureKind = MeasureKind.RADIAL_ANGULAR_DENSITY,
) -> LevyMeasure:
    """Measure with a single shared radial profile on the given (or design) atoms."""
    directions, weights = _resolve_atoms(d, atoms)
    key = (
        f"{kind.value}(sigma={sigma!r},d={d},profile={profile.label},"
        f"atoms={_atoms_digest(directions, weights)})"
    )
    return LevyMeasure(
        kind=kind,
        sigma=sigma,
        d=d,
        components=(AngularComponent(directions, weights, profile),),
        key=key,
    )


def truncate(pi: LevyMeasure, radius: float) -> LevyMeasure:
    """Restriction of pi to the ball {|y| <= radius}."""
    if not radius > 0:
        raise ParameterError(f"truncation radius must be positive, got {radius}")
    return pi.map_components(
        lambda c: c.with_profile(c.profile.restricted(cap=radius)), f"trunc({radius!r})"
    )


def reweight(pi: LevyMeasure, factor: float) -> LevyMeasure:
    """factor * pi for factor >= 0."""
    if factor < 0:
        raise ParameterError(f"measure weights must stay nonnegative, factor={factor}")
    return pi.map_components(lambda c: c.reweighted(factor), f"x{factor!r}")


def superpose(measures: Sequence[LevyMeasure], factors: Sequence[float]) -> LevyMeasure:
    """
    Nonnegative combination sum_k a_k pi_k of measures on the same space.

    The order of the result is the largest order among the parts.
    """
    if not measures or len(measures) != len(factors):
        raise ParameterError(
            "superpose needs matching nonempty measure and factor lists"
        )
    if any(m.kind is MeasureKind.DIFFERENCE for m in measures):
        raise ParameterError("superpose takes nonnegative measures only")
    if len({m.d for m in measures}) != 1:
        raise ParameterError("superposed measures must share the dimension")
    components = []
    keys = []
    for measure, factor in zip(measures, factors):
        part = reweight(measure, factor)
        components.extend(part.components)
        keys.append(part.key)
    return LevyMeasure(
        kind=MeasureKind.RADIAL_ANGULAR_DENSITY,
        sigma=max(m.sigma for m in measures),
        d=measures[0].d,
        components=tuple(components),
        key="sum(" + ",".join(keys) + ")",
    )


def difference(minuend: LevyMeasure, subtrahend: LevyMeasure) -> LevyMeasure:
    """Signed measure minuend - subtrahend."""
    return LevyMeasure(
        kind=MeasureKind.DIFFERENCE,
        sigma=max(minuend.sigma, subtrahend.sigma),
        d=minuend.d,
        components=(),
        key=f"diff({minuend.key},{subtrahend.key})",
        minuend=minuend,
        subtrahend=subtrahend,
    )


def scale_measure(pi: LevyMeasure, R: float, kappa: ScalingTriple) -> LevyMeasure:
    """
    The rescaled measure kappa(R) * pi_R with pi_R(G) = pi({y : y/R in G}).

    Radial densities become kappa(R) R rho(R r); the order is unchanged.

    Raises:
        ParameterError: If R is not positive
    """
    if not R > 0:
        raise ParameterError(f"scale R must be positive, got {R}")
    factor = kappa.kappa_at(R)
    return pi.map_components(
        lambda c: c.with_profile(c.profile.rescaled(R, factor)), f"tilde(R={R!r})"
    )


def radial_moment(
    pi: LevyMeasure, alpha: float, lo: float = 0.0, hi: float = math.inf
) -> MomentEstimate:
    """
    Integral of |y|^alpha over {lo < |y| <= hi} against pi.

    Raises:
        ParameterError: For difference measures (moments are taken per part)
    """
    if pi.kind is MeasureKind.DIFFERENCE:
        raise ParameterError("moments of difference measures are taken per part")
    total = 0.0
    converged = True
    notes = []
    for component in pi.components:
        mass = float(np.sum(component.weights))
        if mass == 0.0:
            continue
        estimate = component.profile.moment(alpha, lo, hi)
        total += mass * estimate.value
        converged = converged and estimate.converged
        if estimate.diagnostic:
            notes.append(estimate.diagnostic)
    return MomentEstimate(total, converged and math.isfinite(total), "; ".join(notes))


def directional_second_moment(pi: LevyMeasure, radius: float = 1.0) -> FloatArray:
    """Small-ball covariance sum_i s_i w_i w_i^T integral_0^radius r^2 rho dr."""
    if pi.kind is MeasureKind.DIFFERENCE:
        raise ParameterError("second moments of difference measures are taken per part")
    matrix = np.zeros((pi.d, pi.d))
    for component in pi.components:
        radial = component.profile.moment(2.0, 0.0, radius).value
        if radial == 0.0:
            continue
        weighted = component.directions * component.weights[:, None]
        matrix += radial * weighted.T @ component.directions
    return matrix


@dataclass(frozen=True)
class OrderEstimate:
    """Blow-up exponent of a measure at the origin with its fit quality."""

    value: float
    residual: float
    wide_confidence: bool


def estimate_order(pi: LevyMeasure) -> OrderEstimate:
    """
    Estimate sigma = inf{alpha : integral_{|y|<=1} |y|^alpha dpi < infinity}.

    Second moments over geometric shells (eps, q eps] with eps in
    [1e-8, 1e-4] scale like eps^(2 - sigma); sigma is read off the log-log
    slope. Measures without mass near the origin, or with a density bounded
    there (slope above 2), have order 0.

    Returns:
        OrderEstimate; wide_confidence is set when the shells are not power-like
    """
    if pi.kind is MeasureKind.DIFFERENCE:
        assert pi.minuend is not None and pi.subtrahend is not None
        first = estimate_order(pi.minuend)
        second = estimate_order(pi.subtrahend)
        return max(first, second, key=lambda e: e.value)
    shells = np.array(
        [
            radial_moment(pi, 2.0, float(lo), float(hi)).value
            for lo, hi in zip(ORDER_SHELLS[:-1], ORDER_SHELLS[1:])
        ]
    )
    positive = shells > 0
    if not np.any(positive):
        return OrderEstimate(0.0, 0.0, False)
    if np.count_nonzero(positive) < 3:
        logger.warning("%s: too few populated shells for an order fit", pi.key)
        return OrderEstimate(0.0, math.inf, True)
    fit = loglog_fit(ORDER_SHELLS[:-1][positive], shells[positive])
    wide = fit.residual > ORDER_RESIDUAL_LIMIT or not np.all(positive)
    if wide:
        logger.warning(
            "%s: radial behaviour is not power-like near 0 (residual %.3g)",
            pi.key,
            fit.residual,
        )
    return OrderEstimate(max(0.0, 2.0 - fit.slope), fit.residual, wide)


def common_atoms(first: LevyMeasure, second: LevyMeasure) -> bool:
    """True when every atom of ``second`` appears among the atoms of ``first``."""
    mine = [c.directions for _, _, c in first.signed_components()]
    if not mine:
        return not any(True for _ in second.signed_components())
    stacked = np.concatenate(mine)
    for _, _, component in second.signed_components():
        for w in component.directions:
            if not np.any(np.all(np.abs(stacked - w) <= SYMMETRY_TOLERANCE, axis=1)):
                return False
    return True


def directional_density(pi: LevyMeasure, w: FloatArray, r: FloatArray) -> FloatArray:
    """Radial density of pi along w, summed over the atoms equal to w with weights."""
    total = np.zeros_like(np.asarray(r, dtype=float))
    for sign, _, component in pi.signed_components():
        match = np.all(np.abs(component.directions - w) <= SYMMETRY_TOLERANCE, axis=1)
        weight = float(np.sum(component.weights[match]))
        if weight:
            total = total + sign * weight * component.profile.density(r)
    return total
