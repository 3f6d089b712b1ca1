"""Bernstein functions and the jump kernels of subordinated Brownian motion.

A Bernstein function phi(r) = integral (1 - exp(-r t)) Lambda(dt) defines
the radial jump kernel

    j(r) = integral_0^infinity (4 pi t)^(-d/2) exp(-r^2 / (4 t)) Lambda(dt),

and the measure y -> a(|y|, y/|y|) j(|y|) dy in radial-angular form. The
weighted Levy density t * lambda(t) is the inverse Laplace transform of
phi', recovered with a fixed Talbot contour when no closed form is known.
"""

import functools
import hashlib
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import numpy.typing as npt
from scipy import interpolate, special

from nonlocal_cauchy.analysis.levy_measure import (
    AngularComponent,
    LevyMeasure,
    MeasureKind,
    MeasureValidationError,
    RadialProfile,
    sphere_design,
)
from nonlocal_cauchy.analysis.scaling import (
    GeneralizedInverse,
    ScalingTriple,
    piecewise_power_ell,
    power_exponents,
)
from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.quadrature import gauss_legendre, linear_fit, log_slope
from nonlocal_cauchy.common.reports import CheckReport

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
AFactor = Callable[[FloatArray, FloatArray], FloatArray]

TALBOT_DEGREE = 24
KERNEL_TABLE = np.geomspace(1e-12, 1e12, 512)
LOG_TIME_LO = math.log(1.0 / 2800.0)
LOG_TIME_HI = math.log(1e10)
TIME_NODES = 12
KERNEL_CHUNK = 32
SLOPE_GRID = np.geomspace(1e-10, 1e10, 81)
DELTA_MARGIN = 2e-3
SCALING_SAFETY = 1.05
ORDER_SNAP = 1e-6


class BernsteinError(ParameterError):
    """Raised when a Bernstein function is rejected for use as a jump kernel."""


def talbot_inverse(
    transform: Callable[[ComplexArray], ComplexArray],
    t: npt.ArrayLike,
    degree: int = TALBOT_DEGREE,
) -> FloatArray:
    """
    Fixed-Talbot numerical inverse Laplace transform.

    The contour s(theta) = r theta (cot theta + i), r = 2 degree / (5 t),
    is sampled at theta_k = k pi / degree; conjugate symmetry halves the
    work so only the upper branch is evaluated.

    Args:
        transform: Laplace transform F(s), vectorized over complex arrays
        t: Positive times
        degree: Number of contour nodes

    Returns:
        f(t) for every requested time, same shape as t
    """
    times = np.asarray(t, dtype=float)
    flat = np.atleast_1d(times).ravel()
    theta = np.arange(1, degree) * math.pi / degree
    cot = 1.0 / np.tan(theta)
    r = 2.0 * degree / (5.0 * flat)
    nodes = r[:, None] * theta[None, :] * (cot + 1j)[None, :]
    weights = 1.0 + 1j * (theta * (1.0 + cot**2) - cot)
    values = transform(nodes.astype(np.complex128))
    head = 0.5 * np.exp(r * flat) * np.real(transform(r.astype(np.complex128)))
    terms = np.exp(flat[:, None] * nodes) * values * weights[None, :]
    body = np.real(terms).sum(axis=1)
    result = (r / degree) * (head + body)
    return np.asarray(result.reshape(times.shape), dtype=float)


def _log_cosh_sqrt(s: npt.NDArray[np.generic]) -> npt.NDArray[np.generic]:
    # ln cosh z = z - ln 2 + log1p(exp(-2 z)) for Re z >= 0; series in s = z^2 near 0
    z = np.sqrt(s)
    with np.errstate(over="ignore", invalid="ignore"):
        closed = z - math.log(2.0) + np.log1p(np.exp(-2.0 * z))
    series = s / 2.0 - s**2 / 12.0 + s**3 / 45.0 - 17.0 * s**4 / 2520.0
    return np.asarray(np.where(np.abs(s) < 1e-2, series, closed))


@dataclass(frozen=True, eq=False)
class BernsteinFunction:
    """
    A Bernstein function with the data needed to recover its Levy measure.

    Exactly one of ``derivative`` (phi' on complex arguments),
    ``weighted_density`` (closed-form t * lambda(t)) or ``atoms`` (discrete
    Lambda as (times, masses)) drives the kernel computation.
    """

    label: str
    phi: Callable[[FloatArray], FloatArray]
    exponent_at_infinity: float
    derivative: Optional[Callable[[ComplexArray], ComplexArray]] = None
    weighted_density: Optional[Callable[[FloatArray], FloatArray]] = None
    atoms: Optional[tuple[FloatArray, FloatArray]] = None

    def __call__(self, r: npt.ArrayLike) -> FloatArray:
        return self.phi(np.asarray(r, dtype=float))

    def levy_weighted_density(self, t: npt.ArrayLike) -> FloatArray:
        """t * lambda(t) for the Levy density lambda of Lambda."""
        times = np.asarray(t, dtype=float)
        if self.weighted_density is not None:
            return self.weighted_density(times)
        if self.derivative is None:
            raise BernsteinError(f"{self.label}: Lambda is discrete, no density exists")
        values = talbot_inverse(self.derivative, times)
        if np.any(values < 0):
            logger.debug(
                "%s: clipped %d negative inverse-Laplace values",
                self.label,
                int(np.count_nonzero(values < 0)),
            )
        return np.maximum(values, 0.0)


def catalog_function(
    item: int,
    alphas: Optional[list[float]] = None,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
) -> BernsteinFunction:
    """
    One of the four standard Bernstein families.

    (0) sum_i r^alpha_i; (1) (r + r^alpha)^beta; (2) r^alpha ln(1 + r)^beta;
    (3) ln(cosh sqrt(r))^alpha. Parameters lie in (0, 1), and item (2) also
    needs beta < 1 - alpha.

    Raises:
        BernsteinError: For an unknown item or parameters out of range
    """

    def unit(name: str, value: Optional[float]) -> float:
        if value is None or not 0 < value < 1:
            raise BernsteinError(
                f"catalog item {item} needs {name} in (0, 1), got {value}"
            )
        return float(value)

    if item == 0:
        powers = np.asarray(alphas or [], dtype=float)
        if powers.size == 0 or np.any((powers <= 0) | (powers >= 1)):
            raise BernsteinError("catalog item 0 needs exponents in (0, 1)")
        scales = powers / special.gamma(1.0 - powers)

        def phi0(r: FloatArray) -> FloatArray:
            return np.asarray(np.sum(r[..., None] ** powers, axis=-1), dtype=float)

        def density0(t: FloatArray) -> FloatArray:
            terms = scales * t[..., None] ** (-powers)
            return np.asarray(np.sum(terms, axis=-1), dtype=float)

        return BernsteinFunction(
            label=f"sum_powers({','.join(f'{p:g}' for p in powers)})",
            phi=phi0,
            exponent_at_infinity=float(powers.max()),
            weighted_density=density0,
        )
    if item == 1:
        a = unit("alpha", alpha)
        b = unit("beta", beta)

        def phi1(r: FloatArray) -> FloatArray:
            return np.asarray((r + r**a) ** b, dtype=float)

        def dphi1(s: ComplexArray) -> ComplexArray:
            return np.asarray(b * (s + s**a) ** (b - 1.0) * (1.0 + a * s ** (a - 1.0)))

        return BernsteinFunction(f"mixed_power({a:g},{b:g})", phi1, b, derivative=dphi1)
    if item == 2:
        a = unit("alpha", alpha)
        b = unit("beta", beta)
        if b >= 1.0 - a:
            raise BernsteinError(
                f"catalog item 2 needs beta < 1 - alpha, got {b} >= {1 - a}"
            )

        def phi2(r: FloatArray) -> FloatArray:
            return np.asarray(r**a * np.log1p(r) ** b, dtype=float)

        def dphi2(s: ComplexArray) -> ComplexArray:
            log = np.log1p(s)
            return np.asarray(
                a * s ** (a - 1.0) * log**b + b * s**a * log ** (b - 1.0) / (1.0 + s)
            )

        return BernsteinFunction(f"power_log({a:g},{b:g})", phi2, a, derivative=dphi2)
    if item == 3:
        a = unit("alpha", alpha)

        def phi3(r: FloatArray) -> FloatArray:
            return np.asarray(np.real(_log_cosh_sqrt(r)) ** a, dtype=float)

        def dphi3(s: ComplexArray) -> ComplexArray:
            root = np.sqrt(s)
            return np.asarray(
                a * _log_cosh_sqrt(s) ** (a - 1.0) * np.tanh(root) / (2.0 * root)
            )

        return BernsteinFunction(f"log_cosh({a:g})", phi3, 0.5 * a, derivative=dphi3)
    raise BernsteinError(f"unknown catalog item {item}; expected 0..3")


def from_levy_atoms(times: npt.ArrayLike, masses: npt.ArrayLike) -> BernsteinFunction:
    """Bernstein function of a discrete Lambda = sum_k m_k delta_{t_k}."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    m = np.atleast_1d(np.asarray(masses, dtype=float))
    if t.shape != m.shape or np.any(t <= 0) or np.any(m < 0):
        raise BernsteinError("Lambda atoms need positive times and nonnegative masses")

    def phi(r: FloatArray) -> FloatArray:
        terms = -m * np.expm1(-r[..., None] * t)
        return np.asarray(np.sum(terms, axis=-1), dtype=float)

    return BernsteinFunction(
        label=f"atoms({t.size})", phi=phi, exponent_at_infinity=0.0, atoms=(t, m)
    )


def jump_kernel(phi: BernsteinFunction, d: int, r: npt.ArrayLike) -> FloatArray:
    """
    j(r) by quadrature of the subordination integral.

    With t = r^2 e^u the integrand is smooth in u; unit-width panels cover
    u in [ln(1/2800), ln(1e10)] and the part beyond is closed with the
    local power of t * lambda(t).
    """
    radii = np.asarray(r, dtype=float)
    flat = np.atleast_1d(radii).ravel()
    if phi.atoms is not None:
        t, m = phi.atoms
        gauss = np.exp(-flat[:, None] ** 2 / (4.0 * t))
        heat = (4.0 * math.pi * t) ** (-0.5 * d) * gauss
        values = np.sum(m * heat, axis=1)
        return np.asarray(values.reshape(radii.shape), dtype=float)

    x, w = gauss_legendre(TIME_NODES)
    edges = np.arange(LOG_TIME_LO, LOG_TIME_HI + 0.5, 1.0)
    edges[-1] = LOG_TIME_HI
    half = 0.5 * np.diff(edges)
    u = (edges[:-1, None] + half[:, None] * (x + 1.0)).ravel()
    weights = (half[:, None] * w).ravel()

    damping = np.exp(-0.25 * np.exp(-u))
    body = np.empty_like(flat)
    for start in range(0, flat.size, KERNEL_CHUNK):
        rows = flat[start : start + KERNEL_CHUNK]
        t = rows[:, None] ** 2 * np.exp(u)[None, :]
        g = phi.levy_weighted_density(t)
        body[start : start + KERNEL_CHUNK] = (
            (4.0 * math.pi * t) ** (-0.5 * d) * damping[None, :] * g
        ) @ weights

    t_end = flat**2 * math.exp(LOG_TIME_HI)
    g_end = phi.levy_weighted_density(t_end)
    beta = -log_slope(phi.levy_weighted_density, t_end)
    beta = np.where(np.isfinite(beta), beta, 0.0)
    tail = (4.0 * math.pi * t_end) ** (-0.5 * d) * g_end / (0.5 * d + beta)
    return np.asarray((body + tail).reshape(radii.shape), dtype=float)


class JumpKernelTable:
    """
    j(r) tabulated on 512 log-spaced radii over [1e-12, 1e12].

    A cubic spline in (ln r, ln j) interpolates the table; outside it the
    kernel continues along the end tangents, as a power law.
    """

    def __init__(self, phi: BernsteinFunction, d: int) -> None:
        values = jump_kernel(phi, d, KERNEL_TABLE)
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise BernsteinError(
                f"{phi.label}: jump kernel is not positive on the table"
            )
        self.label = phi.label
        self._log_r = np.log(KERNEL_TABLE)
        self._spline = interpolate.CubicSpline(self._log_r, np.log(values))
        self._low_slope = float(self._spline(self._log_r[0], 1))
        self._high_slope = float(self._spline(self._log_r[-1], 1))
        logger.debug(
            "%s: kernel table built, end slopes %.4g / %.4g",
            phi.label,
            self._low_slope,
            self._high_slope,
        )

    def __call__(self, r: npt.ArrayLike) -> FloatArray:
        lx = np.log(np.asarray(r, dtype=float))
        lo, hi = self._log_r[0], self._log_r[-1]
        inside = self._spline(np.clip(lx, lo, hi))
        below = self._spline(lo) + self._low_slope * (lx - lo)
        above = self._spline(hi) + self._high_slope * (lx - hi)
        outer = np.where(lx > hi, above, inside)
        return np.asarray(np.exp(np.where(lx < lo, below, outer)))


@dataclass(frozen=True)
class DeltaFit:
    """Exponents of the two-sided ratio bound on phi with its constant."""

    delta1: float
    delta2: float
    constant: float
    slope_zero: float
    slope_infinity: float


def _extrapolated_slope(r: FloatArray, slopes: FloatArray) -> float:
    fit = linear_fit(1.0 / np.abs(np.log(r)), slopes)
    return fit.intercept


def fit_deltas(phi: BernsteinFunction) -> DeltaFit:
    """
    Fit 0 < delta1 <= delta2 with N^-1 (R/r)^delta1 <= phi(R)/phi(r) <= N (R/r)^delta2.

    Local log-slopes of phi on [1e-10, 1e10] are extended to 0 and infinity
    by regressing them against 1/|ln r| over the outer four decades, which
    captures logarithmic corrections. The exponents get a 2e-3 margin and N
    is the worst ratio violation over all grid pairs.
    """
    r = SLOPE_GRID
    slopes = log_slope(phi.phi, r)
    if not np.all(np.isfinite(slopes)):
        raise BernsteinError(f"{phi.label}: phi is not positive on [1e-10, 1e10]")
    decades = np.log10(r)
    low = decades <= -6.0
    high = decades >= 6.0
    slope_zero = _extrapolated_slope(r[low], slopes[low])
    slope_inf = _extrapolated_slope(r[high], slopes[high])
    delta1 = min(float(slopes.min()), slope_zero, slope_inf) - DELTA_MARGIN
    delta2 = max(float(slopes.max()), slope_zero, slope_inf) + DELTA_MARGIN

    values = phi.phi(r)
    ratio = values[None, :] / values[:, None]
    span = r[None, :] / r[:, None]
    upper = np.triu(np.ones_like(ratio, dtype=bool))
    lower_violation = span**delta1 / ratio
    upper_violation = ratio / span**delta2
    constant = float(
        max(1.0, lower_violation[upper].max(), upper_violation[upper].max())
    )
    fit = DeltaFit(delta1, delta2, constant, slope_zero, slope_inf)
    logger.info(
        "%s: delta1=%.4g delta2=%.4g N=%.4g", phi.label, delta1, delta2, constant
    )
    return fit


def check_assumption_H(
    phi: BernsteinFunction,
    d: int,
    kernel: Optional[Callable[[FloatArray], FloatArray]] = None,
    r_grid: Optional[FloatArray] = None,
) -> list[CheckReport]:
    """
    Audit the kernel sandwich and the ratio bound on phi.

    The sandwich reports N = max(max q, 1/min q) for q(r) = j(r) r^d / phi(r^-2)
    together with the normalization-free spread max q / min q.

    Args:
        phi: Bernstein function
        d: Dimension
        kernel: j(r); computed by quadrature when absent
        r_grid: Radii of the sandwich audit (default 61 points on [1e-3, 1e3])

    Returns:
        Reports "H(i)" and "H(ii)"
    """
    r = np.geomspace(1e-3, 1e3, 61) if r_grid is None else np.asarray(r_grid, float)
    j = kernel(r) if kernel is not None else jump_kernel(phi, d, r)
    q = j * r**d / phi.phi(r**-2.0)
    finite = bool(np.all(np.isfinite(q)) and np.all(q > 0))
    q_max = float(q.max()) if finite else math.inf
    q_min = float(q.min()) if finite else 0.0
    sandwich = max(q_max, 1.0 / q_min) if finite else math.inf
    worst = int(np.argmax(np.maximum(q, 1.0 / np.where(q > 0, q, np.nan))))
    reports = [
        CheckReport(
            name="H(i)",
            value=sandwich,
            bound=math.inf,
            passed=finite,
            worst_point=float(r[worst]) if finite else None,
            details={"spread": q_max / q_min if finite else math.inf, "q_min": q_min},
            diagnostic="" if finite else "kernel ratio is not positive and finite",
        )
    ]
    try:
        fit = fit_deltas(phi)
    except BernsteinError as e:
        reports.append(CheckReport("H(ii)", math.inf, 1.0, False, diagnostic=str(e)))
        return reports
    ok = 0.0 < fit.delta1 <= fit.delta2 < 1.0
    reports.append(
        CheckReport(
            name="H(ii)",
            value=fit.delta2,
            bound=1.0,
            passed=ok,
            details={"delta1": fit.delta1, "delta2": fit.delta2, "N": fit.constant},
            diagnostic="" if ok else "fitted exponents leave (0, 1)",
        )
    )
    return reports


@dataclass(frozen=True, eq=False)
class BernsteinModel:
    """Measure, canonical scaling triple and fitted exponents of a Bernstein example."""

    measure: LevyMeasure
    triple: ScalingTriple
    fit: DeltaFit
    kernel: JumpKernelTable
    phi: BernsteinFunction


def _atom_factor(a_factor: AFactor, w: FloatArray, r: FloatArray) -> FloatArray:
    radii = np.asarray(r, dtype=float)
    directions = np.broadcast_to(w, radii.shape + w.shape)
    return np.asarray(a_factor(radii, directions), dtype=float)


def _factor_digest(a_factor: AFactor, directions: FloatArray) -> str:
    """Digest of a(r, w) on a fixed radial ladder at every atom."""
    radii = np.geomspace(1e-12, 1e12, 97)
    values = [_atom_factor(a_factor, w, radii) for w in directions]
    table = np.round(np.stack([np.broadcast_to(v, radii.shape) for v in values]), 14)
    return hashlib.sha256(table.tobytes()).hexdigest()[:12]


def _factor_components(
    directions: FloatArray,
    weights: FloatArray,
    profile: RadialProfile,
    a_factor: Optional[AFactor],
    symmetric: bool,
) -> tuple[AngularComponent, ...]:
    if a_factor is None:
        return (AngularComponent(directions, weights, profile),)
    probe = np.geomspace(1e-6, 1e6, 49)
    components = []
    used = np.zeros(len(directions), dtype=bool)
    for i, w in enumerate(directions):
        if used[i]:
            continue
        used[i] = True
        factor = functools.partial(_atom_factor, a_factor, w)
        members = [i]
        if symmetric:
            partner = np.flatnonzero(
                np.all(np.abs(directions + w) <= 1e-12, axis=1) & ~used
            )
            if partner.size == 0:
                raise MeasureValidationError(f"atom {w} has no antipode")
            j = int(partner[0])
            mirrored = _atom_factor(a_factor, directions[j], probe)
            if np.any(np.abs(factor(probe) - mirrored) > 1e-12):
                raise MeasureValidationError("order-1 measures need a(r, w) = a(r, -w)")
            used[j] = True
            members.append(j)
        components.append(
            AngularComponent(
                directions[members],
                weights[members],
                profile.multiplied(factor, f"a{i}"),
            )
        )
    return tuple(components)


def canonical_triple(
    kernel: Callable[[FloatArray], FloatArray], d: int, fit: DeltaFit, label: str
) -> ScalingTriple:
    """
    kappa(R) = 1 / (j(R) R^d) with l(eps) = C1 eps^(2 delta1) for eps <= 1 and
    C1 eps^(2 delta2) above.

    C1 is 1.05 times the largest kappa(eps r) / (kappa(r) eps^(2 delta)) on a
    dense grid, which makes l a valid scaling factor for kappa.
    """

    def kappa(R: FloatArray) -> FloatArray:
        x = np.asarray(R, dtype=float)
        return np.asarray(1.0 / (kernel(x) * x**d))

    eps = np.geomspace(1e-6, 1e6, 121)
    r = np.geomspace(1e-6, 1e6, 121)
    ratio = kappa(np.outer(eps, r)) / kappa(r)[None, :]
    powers = np.where(eps <= 1.0, 2.0 * fit.delta1, 2.0 * fit.delta2)
    c1 = SCALING_SAFETY * float(np.max(ratio / (eps**powers)[:, None]))
    ell, gamma = piecewise_power_ell(c1, fit.delta1, fit.delta2)
    theta0, theta1, base = power_exponents(ell)
    logger.info("%s: scaling constant C1=%.4g (N=%d)", label, c1, base)
    return ScalingTriple(
        kappa=kappa,
        ell=ell,
        gamma=gamma,
        a_inv=GeneralizedInverse(kappa),
        theta0=theta0,
        theta1=theta1,
        label=f"bernstein({label},C1={c1:.6g})",
    )


def bernstein_measure(
    phi: BernsteinFunction,
    d: int,
    atoms: Optional[tuple[npt.ArrayLike, npt.ArrayLike]] = None,
    a_factor: Optional[AFactor] = None,
) -> BernsteinModel:
    """
    Levy measure a(r, w) j(r) r^(d-1) S(dw) dr of a subordinated Brownian motion.

    Args:
        phi: Bernstein function
        d: Dimension
        atoms: Angular atoms (directions, weights); the sphere design when absent
        a_factor: Bounded factor a(r, w) in [rho0(w), 1]; identity when absent

    Returns:
        BernsteinModel with the measure, kappa(R) = 1/(j(R) R^d) and the delta fit

    Raises:
        BernsteinError: If the fitted exponents violate 0 < delta1 <= delta2 < 1
    """
    fit = fit_deltas(phi)
    if fit.delta2 >= 1.0 or fit.delta1 <= 0.0:
        raise BernsteinError(
            f"{phi.label}: fitted exponents delta1={fit.delta1:.4g}, "
            f"delta2={fit.delta2:.4g} leave (0, 1); "
            "the kernel is not of order in (0, 2)"
        )
    sigma = 2.0 * phi.exponent_at_infinity
    if abs(sigma - 1.0) <= ORDER_SNAP:
        sigma = 1.0
    kernel = JumpKernelTable(phi, d)

    def radial(r: FloatArray) -> FloatArray:
        x = np.asarray(r, dtype=float)
        return np.asarray(kernel(x) * x ** (d - 1))

    profile = RadialProfile(base=radial, label=f"subordinated({phi.label},d={d})")
    if atoms is None:
        directions, weights = sphere_design(d)
    else:
        directions = np.atleast_2d(np.asarray(atoms[0], dtype=float))
        weights = np.atleast_1d(np.asarray(atoms[1], dtype=float))
    components = _factor_components(
        directions, weights, profile, a_factor, sigma == 1.0
    )
    factor_label = "1" if a_factor is None else _factor_digest(a_factor, directions)
    measure = LevyMeasure(
        kind=MeasureKind.BERNSTEIN_SUBORDINATED,
        sigma=sigma,
        d=d,
        components=components,
        key=(
            f"bernstein({phi.label},d={d},a={factor_label},"
            f"atoms={np.round(directions, 12).tolist()}"
            f"|{np.round(weights, 12).tolist()})"
        ),
        a_factor=a_factor,
    )
    triple = canonical_triple(kernel, d, fit, phi.label)
    return BernsteinModel(
        measure=measure, triple=triple, fit=fit, kernel=kernel, phi=phi
    )


def constant_factor(value: float) -> AFactor:
    """a(r, w) = value, for value in (0, 1]."""
    if not 0 < value <= 1:
        raise ParameterError(f"constant density factor must lie in (0, 1], got {value}")

    def factor(r: FloatArray, w: FloatArray) -> FloatArray:
        return np.full(np.shape(r), value)

    factor.__name__ = f"const({value!r})"
    return factor
