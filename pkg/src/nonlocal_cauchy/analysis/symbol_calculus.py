"""Levy symbols and the Fourier multipliers built from them.

The symbol of a radial-angular measure splits into one radial integral per
angular atom,

    psi(xi) = sum_i s_i integral [exp(i v r) - 1 - i chi(r) v r] rho(r) dr,

with v = 2 pi xi . w_i. In the variable u = |v| r the integrand is the fixed
oscillation cos u - 1 (resp. sin u - chi u) against g(u) = rho(u/|v|)/|v|,
so one panel layout in u serves every frequency: log panels near 0, panels
of width pi/2 up to u = 32 pi, and integration by parts beyond.
"""

import json
import logging
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import numpy.typing as npt

from nonlocal_cauchy.analysis.levy_measure import (
    LevyMeasure,
    RadialProfile,
    stable_measure,
)
from nonlocal_cauchy.common.errors import NumericalGuardError, ParameterError
from nonlocal_cauchy.common.grid import Field, GridSpec, Space, require_same_grid
from nonlocal_cauchy.common.quadrature import log_edges, panel_rule
from nonlocal_cauchy.common.reports import CheckReport, write_json

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
PointFunction = Callable[[FloatArray], npt.NDArray[np.generic]]

SMALL_U = 1e-8
OSCILLATION_END = 32.0 * math.pi
TAIL_END = 1e12
BASE_ORDER = 8
REFINED_ORDERS = (16, 24)
CHUNK = 4096
CHECK_POINTS = 16
CONVERGENCE_TOLERANCE = 1e-6
SERIES_CUTOFF = 0.1
CACHE_ENTRIES = 32
CACHE_BYTES = 1 << 29

_NEAR_EDGES = np.concatenate(
    [
        log_edges(SMALL_U, 1.0, 2)[:-1],
        np.append(np.arange(1.0, OSCILLATION_END, 0.5 * math.pi), OSCILLATION_END),
    ]
)
_TAIL_EDGES = log_edges(OSCILLATION_END, TAIL_END, 4)

_CACHE: OrderedDict[tuple[object, ...], "SpectralMultiplier"] = OrderedDict()
_CACHE_LOCK = threading.Lock()


class SymbolQuadratureError(NumericalGuardError):
    """Raised when the symbol quadrature does not settle under panel refinement."""

    def __init__(self, message: str, worst_xi: Optional[list[float]] = None) -> None:
        super().__init__(message)
        self.worst_xi = worst_xi


class DegenerateComparatorError(ParameterError):
    """Raised when a comparator symbol vanishes away from the origin."""


@dataclass(frozen=True, eq=False)
class SpectralMultiplier:
    """A function of frequency tabulated on the lattice of a grid (FFT order)."""

    grid: GridSpec
    values: ComplexArray
    label: str

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise ParameterError(
                f"multiplier of shape {self.values.shape} "
                f"does not match grid {self.grid.shape}"
            )

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))

    def reflected(self) -> ComplexArray:
        """m(-xi) on the lattice."""
        axes = tuple(range(self.grid.d))
        return np.asarray(np.roll(np.flip(self.values, axes), 1, axes))

    def is_hermitian(self, tolerance: float = 1e-12) -> bool:
        """m(-xi) = conj m(xi) off the Nyquist boundary, so real data stays real."""
        interior = ~self.grid.nyquist_mask()
        scale = max(float(np.abs(self.values).max(initial=0.0)), 1.0)
        gap = np.abs(self.reflected() - np.conj(self.values))[interior]
        return bool(np.all(gap <= tolerance * scale))

    def map(
        self, func: Callable[[ComplexArray], npt.ArrayLike], label: str
    ) -> "SpectralMultiplier":
        """Pointwise function of the multiplier."""
        return SpectralMultiplier(
            self.grid,
            np.asarray(func(self.values), dtype=complex),
            f"{label}[{self.label}]",
        )

    def times(self, other: "SpectralMultiplier") -> "SpectralMultiplier":
        require_same_grid(self.grid, other.grid)
        return SpectralMultiplier(
            self.grid, self.values * other.values, f"{self.label}*{other.label}"
        )


def apply_multiplier(m: SpectralMultiplier, f: Field) -> Field:
    """
    Forward transform, multiply pointwise, inverse transform.

    Args:
        m: Multiplier
        f: Field on the same grid

    Returns:
        Physical-space field; real when f is real and m is Hermitian

    Raises:
        GridMismatchError: If the grids differ
    """
    require_same_grid(m.grid, f.grid)
    spectrum = f.to_frequency()
    real = f.real and m.is_hermitian()
    product = Field(f.grid, spectrum.values * m.values, Space.FREQUENCY, real)
    return product.to_physical()


def _cos_minus_one(u: FloatArray) -> FloatArray:
    return np.asarray(-2.0 * np.sin(0.5 * u) ** 2)


def _sin_minus_identity(u: FloatArray) -> FloatArray:
    u2 = u * u
    series = -u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)))
    return np.asarray(np.where(np.abs(u) < SERIES_CUTOFF, series, np.sin(u) - u))


def _small_ball_integral(
    rho0: FloatArray, beta: FloatArray, r0: FloatArray, floor: float, alpha: float
) -> FloatArray:
    # integral_floor^r0 r^alpha rho for rho ~ rho0 (r/r0)^(-1-beta)
    e = alpha - beta
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(floor > 0, (floor / r0) ** e, 0.0)
        return np.asarray(rho0 * r0 ** (alpha + 1.0) * (1.0 - ratio) / e)


def _power_tail(
    value: FloatArray, beta: FloatArray, ref: float, alpha: float, hi: FloatArray
) -> FloatArray:
    # integral_ref^hi u^alpha g for g ~ value (u/ref)^(-1-beta)
    e = alpha - beta
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        upper = np.where(np.isinf(hi), 0.0, hi**e)
        return np.asarray(value * ref ** (1.0 + beta) * (upper - ref**e) / e)


def _radial_transform(
    profile: RadialProfile, v: FloatArray, regime: str, odd: bool, order: int
) -> tuple[FloatArray, FloatArray]:
    """
    Cosine and sine parts of one atom's radial integral at frequencies v > 0.

    Returns:
        (C, S) with C(v) = integral (cos vr - 1) rho dr and
        S(v) = integral (sin vr - chi(r) v r) rho dr (zeros when odd is False)
    """
    a, b = profile.floor, profile.cap
    lo_u = v * a
    hi_u = v * b

    edges = np.clip(_NEAR_EDGES[None, :], lo_u[:, None], hi_u[:, None])
    u, w = panel_rule(edges, order)
    vv = v[:, None]
    g = profile.density(u / vv) / vv
    cos_part = np.sum(w * _cos_minus_one(u) * g, axis=1)
    sin_part = np.zeros_like(v)
    if odd:
        kernel = np.sin(u) if regime == "none" else _sin_minus_identity(u)
        sin_part = np.sum(w * kernel * g, axis=1)

    small = lo_u < SMALL_U
    if np.any(small):
        r0 = np.minimum(SMALL_U / v[small], b)
        inside = r0 > a
        r0 = np.where(inside, r0, 1.0)
        rho0 = np.asarray(profile.base(r0), dtype=float)
        beta = profile.exponent(r0)
        vs = v[small]
        closure = -0.5 * vs**2 * _small_ball_integral(rho0, beta, r0, a, 2.0)
        cos_part[small] += np.where(inside, closure, 0.0)
        if odd:
            if regime == "none":
                odd_closure = vs * _small_ball_integral(rho0, beta, r0, a, 1.0)
            else:
                cubic = _small_ball_integral(rho0, beta, r0, a, 3.0)
                odd_closure = -(vs**3) / 6.0 * cubic
            sin_part[small] += np.where(inside, odd_closure, 0.0)

    start = np.maximum(OSCILLATION_END, lo_u)
    tail = hi_u > start
    if np.any(tail):
        vt = v[tail]
        A = start[tail]
        B = hi_u[tail]

        def antiderivatives(x: FloatArray) -> tuple[FloatArray, FloatArray]:
            finite = np.isfinite(x)
            point = np.where(finite, x, 1.0)
            rho, d1, d2 = profile.derivatives(point / vt)
            g0, g1, g2 = rho / vt, d1 / vt**2, d2 / vt**3
            s, c = np.sin(point), np.cos(point)
            first = s * g0 + c * g1 - s * g2
            second = -c * g0 + s * g1 + c * g2
            return np.where(finite, first, 0.0), np.where(finite, second, 0.0)

        cos_b, sin_b = antiderivatives(B)
        cos_a, sin_a = antiderivatives(A)

        capped = np.minimum(B, TAIL_END)
        tail_edges = np.clip(_TAIL_EDGES[None, :], A[:, None], capped[:, None])
        ut, wt = panel_rule(tail_edges, BASE_ORDER)
        gt = profile.density(ut / vt[:, None]) / vt[:, None]
        mass = np.sum(wt * gt, axis=1)
        first_moment: Optional[FloatArray] = None
        if odd and regime == "full":
            first_moment = np.sum(wt * ut * gt, axis=1)

        beyond = B > TAIL_END
        if np.any(beyond):
            r_end = TAIL_END / vt[beyond]
            g_end = np.asarray(profile.base(r_end), dtype=float) / vt[beyond]
            beta_end = profile.exponent(r_end)
            mass[beyond] += _power_tail(g_end, beta_end, TAIL_END, 0.0, B[beyond])
            if first_moment is not None:
                first_moment[beyond] += _power_tail(
                    g_end, beta_end, TAIL_END, 1.0, B[beyond]
                )

        cos_part[tail] += cos_b - cos_a - mass
        if odd:
            odd_tail = sin_b - sin_a
            if first_moment is not None:
                odd_tail = odd_tail - first_moment
            sin_part[tail] += odd_tail
    return cos_part, sin_part


def _evaluate(
    pi: LevyMeasure, xi: FloatArray, symmetric: bool, order: int
) -> ComplexArray:
    psi = np.zeros(xi.shape[0], dtype=complex)
    for sign, owner, component in pi.signed_components():
        if not np.any(component.weights > 0):
            continue
        regime = owner.compensator
        odd = not symmetric and regime != "unit_ball"
        v = 2.0 * math.pi * xi @ component.directions.T
        speed = np.abs(v)
        unique, inverse = np.unique(speed.ravel(), return_inverse=True)
        cos_values = np.zeros_like(unique)
        sin_values = np.zeros_like(unique)
        positive = np.flatnonzero(unique > 0)
        for start in range(0, positive.size, CHUNK):
            index = positive[start : start + CHUNK]
            c, s = _radial_transform(
                component.profile, unique[index], regime, odd, order
            )
            cos_values[index] = c
            sin_values[index] = s
        cos_all = cos_values[inverse].reshape(speed.shape)
        part = cos_all @ component.weights
        if odd:
            sin_all = np.sign(v) * sin_values[inverse].reshape(speed.shape)
            part = part + 1j * (sin_all @ component.weights)
        psi += sign * part
    return psi


def evaluate_symbol(
    pi: LevyMeasure, xi: npt.ArrayLike, symmetric: bool = False, check: bool = True
) -> ComplexArray:
    """
    psi^pi at arbitrary frequencies.

    The compensator follows each part's order: none below 1, the unit ball
    at 1 (where the odd part vanishes by the enforced symmetry) and the full
    first moment above 1. With ``symmetric`` only the real part, the symbol
    of the symmetrized measure, is computed.

    Args:
        pi: Levy measure (differences allowed)
        xi: Frequencies of shape (m, d); (m,) in one dimension
        symmetric: Compute Re psi = psi^{pi_sym} only
        check: Re-evaluate up to 16 frequencies with finer rules

    Returns:
        Complex symbol values of shape (m,)

    Raises:
        SymbolQuadratureError: If two refinements both move the values by
            more than 1e-6 relative, or a value is not finite
    """
    points = np.asarray(xi, dtype=float)
    if points.ndim == 1 and pi.d == 1:
        points = points[:, None]
    if points.ndim != 2 or points.shape[1] != pi.d:
        raise ParameterError(f"frequencies must have shape (m, {pi.d})")
    psi = _evaluate(pi, points, symmetric, BASE_ORDER)
    finite = np.isfinite(psi)
    if not np.all(finite):
        worst = points[int(np.argmin(finite))]
        raise SymbolQuadratureError(
            f"{pi.key}: symbol is not finite", [float(x) for x in worst]
        )
    if check:
        psi = _check_convergence(pi, points, psi, symmetric)
    return psi


def _check_convergence(
    pi: LevyMeasure, points: FloatArray, psi: ComplexArray, symmetric: bool
) -> ComplexArray:
    radius = np.linalg.norm(points, axis=1)
    nonzero = np.flatnonzero(radius > 0)
    if nonzero.size == 0:
        return psi
    ordered = nonzero[np.argsort(radius[nonzero], kind="stable")]
    spread = np.linspace(0, ordered.size - 1, CHECK_POINTS).astype(int)
    picks = ordered[np.unique(spread)]
    floor = 1e-14 * float(np.abs(psi).max())
    previous = psi[picks]
    for attempt, order in enumerate(REFINED_ORDERS):
        refined = _evaluate(pi, points[picks], symmetric, order)
        gap = np.abs(refined - previous) / np.maximum(np.abs(refined), floor)
        gap = np.where(np.abs(refined - previous) == 0.0, 0.0, gap)
        worst = int(np.argmax(gap))
        if gap[worst] <= CONVERGENCE_TOLERANCE:
            if attempt == 0:
                return psi
            logger.warning(
                "%s: symbol settled only at %d nodes per panel; recomputing",
                pi.key,
                order,
            )
            return _evaluate(pi, points, symmetric, order)
        logger.debug(
            "%s: refinement to %d nodes moved psi by %.3g at xi=%s",
            pi.key,
            order,
            gap[worst],
            points[picks][worst],
        )
        previous = refined
    raise SymbolQuadratureError(
        f"{pi.key}: symbol quadrature did not converge "
        f"(relative change {gap[worst]:.3g})",
        [float(x) for x in points[picks][worst]],
    )


def _cached(
    key: tuple[object, ...], build: Callable[[], SpectralMultiplier]
) -> SpectralMultiplier:
    """
    Least-recently-used table of multipliers.

    At most CACHE_ENTRIES tables and CACHE_BYTES of values are kept; the
    newest entry stays even when it alone exceeds the byte limit.
    """
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
        if hit is not None:
            _CACHE.move_to_end(key)
            return hit
    multiplier = build()
    logger.debug("cached multiplier %s", multiplier.label)
    with _CACHE_LOCK:
        kept = _CACHE.setdefault(key, multiplier)
        _CACHE.move_to_end(key)
        while len(_CACHE) > 1 and (
            len(_CACHE) > CACHE_ENTRIES or _cache_bytes() > CACHE_BYTES
        ):
            evicted = _CACHE.popitem(last=False)[1]
            logger.debug("evicted multiplier %s", evicted.label)
        return kept


def _cache_bytes() -> int:
    return sum(m.values.nbytes for m in _CACHE.values())


def cache_len() -> int:
    with _CACHE_LOCK:
        return len(_CACHE)


def clear_cache() -> None:
    with _CACHE_LOCK:
        _CACHE.clear()


def symbol(pi: LevyMeasure, grid: GridSpec) -> SpectralMultiplier:
    """
    psi^pi tabulated on the frequency lattice of grid.

    Raises:
        SymbolQuadratureError: On non-convergence, carrying the worst xi
    """
    if grid.d != pi.d:
        raise ParameterError(f"measure lives in d={pi.d}, grid in d={grid.d}")

    def build() -> SpectralMultiplier:
        values = evaluate_symbol(pi, grid.frequency_points())
        values = values.reshape(grid.shape)
        values.flat[0] = 0.0
        return SpectralMultiplier(grid, values, f"psi[{pi.key}]")

    return _cached(("psi", pi.key, grid), build)


def symbol_sym(pi: LevyMeasure, grid: GridSpec) -> SpectralMultiplier:
    """-integral (1 - cos 2 pi xi . y) dpi_sym, real and nonpositive."""
    if grid.d != pi.d:
        raise ParameterError(f"measure lives in d={pi.d}, grid in d={grid.d}")

    def build() -> SpectralMultiplier:
        values = evaluate_symbol(pi, grid.frequency_points(), symmetric=True).real
        values = values.reshape(grid.shape)
        values.flat[0] = 0.0
        return SpectralMultiplier(grid, values.astype(complex), f"psi_sym[{pi.key}]")

    return _cached(("psi_sym", pi.key, grid), build)


def check_comparability(
    pi: LevyMeasure, mu: LevyMeasure, grid: GridSpec
) -> tuple[float, float]:
    """
    Smallest and largest |psi^pi| / |psi^mu| over the nonzero lattice frequencies.

    Raises:
        DegenerateComparatorError: If psi^mu vanishes at some xi != 0
    """
    numerator = np.abs(symbol(pi, grid).values).ravel()[1:]
    denominator = np.abs(symbol(mu, grid).values).ravel()[1:]
    scale = float(denominator.max(initial=0.0))
    if scale > 0:
        zero = denominator <= 1e-14 * scale
    else:
        zero = np.ones_like(denominator, bool)
    if np.any(zero):
        bad = grid.frequency_points()[1:][int(np.argmax(zero))]
        raise DegenerateComparatorError(
            f"comparator symbol of {mu.key} vanishes at xi={bad.tolist()}"
        )
    ratio = numerator / denominator
    c1, c2 = float(ratio.min()), float(ratio.max())
    logger.info("comparability constants c1=%.6g c2=%.6g", c1, c2)
    return c1, c2


def bessel_multiplier(
    mu: LevyMeasure, s: float, grid: GridSpec
) -> SpectralMultiplier:
    """(1 - psi^{mu_sym})^s; the base is at least 1."""
    if not math.isfinite(s):
        raise ParameterError(f"Bessel order must be finite, got {s}")

    def build() -> SpectralMultiplier:
        base = 1.0 - symbol_sym(mu, grid).values.real
        return SpectralMultiplier(grid, (base**s).astype(complex), f"J^{s!r}[{mu.key}]")

    return _cached(("bessel", mu.key, grid, float(s)), build)


def fractional_multiplier(
    pi: LevyMeasure, delta: float, grid: GridSpec
) -> SpectralMultiplier:
    """psi^pi for delta = 1, otherwise -(-Re psi^pi)^delta with 0^delta = 0."""
    if not 0 < delta <= 1:
        raise ParameterError(f"fractional order must lie in (0, 1], got {delta}")
    if delta == 1:
        return symbol(pi, grid)

    def build() -> SpectralMultiplier:
        magnitude = np.maximum(-symbol_sym(pi, grid).values.real, 0.0)
        values = -(magnitude**delta)
        label = f"psi^{delta!r}[{pi.key}]"
        return SpectralMultiplier(grid, values.astype(complex), label)

    return _cached(("fractional", pi.key, grid, float(delta)), build)


def stable_constant(sigma: float, d: int) -> float:
    """c(sigma, d) with psi(xi) = -c |2 pi xi|^sigma, read off at xi = e_1."""
    pi = stable_measure(sigma, d)
    e1 = np.zeros((1, d))
    e1[0, 0] = 1.0
    value = float(evaluate_symbol(pi, e1)[0].real)
    return -value / (2.0 * math.pi) ** sigma


def _second_difference(
    f: PointFunction, x: FloatArray, w: FloatArray, h: float
) -> float:
    points = np.stack([x + h * w, x, x - h * w])
    values = np.asarray(f(points), dtype=float)
    return float((values[0] - 2.0 * values[1] + values[2]) / h**2)


def nonlocal_quadrature(
    pi: LevyMeasure,
    f: PointFunction,
    grad: PointFunction,
    probes: npt.ArrayLike,
    inner: float = 1e-4,
    outer: float = 1e4,
    per_decade: int = 32,
) -> FloatArray:
    """
    Direct quadrature of integral [f(x + y) - f(x) - chi(y) y . grad f(x)] pi(dy).

    Radii in [inner, outer] use log panels split at r = 1; below ``inner``
    the integrand is replaced by its leading Taylor term and beyond
    ``outer`` f(x + y) is taken as 0.

    Args:
        pi: Levy measure
        f: Real function of points of shape (m, d)
        grad: Gradient of f, shape (m, d)
        probes: Evaluation points of shape (k, d)

    Returns:
        Values at the probes, shape (k,)
    """
    x_all = np.asarray(probes, dtype=float)
    if x_all.ndim == 1 and pi.d == 1:
        x_all = x_all[:, None]
    result = np.zeros(x_all.shape[0])
    for sign, owner, component in pi.signed_components():
        profile = component.profile
        regime = owner.compensator
        lo = max(inner, profile.floor)
        hi = min(outer, profile.cap)
        breaks = sorted({lo, hi} | ({1.0} if lo < 1.0 < hi else set()))
        pieces = [
            panel_rule(log_edges(a, b, per_decade), BASE_ORDER)
            for a, b in zip(breaks[:-1], breaks[1:])
            if b > a
        ]
        r = np.concatenate([p[0] for p in pieces]) if pieces else np.zeros(0)
        weights = np.concatenate([p[1] for p in pieces]) if pieces else np.zeros(0)
        rho_w = weights * profile.density(r)
        chi = np.zeros_like(r) if regime == "none" else (
            (r <= 1.0).astype(float) if regime == "unit_ball" else np.ones_like(r)
        )
        has_near = profile.floor < inner
        has_far = profile.cap > outer
        near = profile.moment(2.0, 0.0, inner).value if has_near else 0.0
        near_first = profile.moment(1.0, 0.0, inner).value if has_near else 0.0
        far_mass = profile.moment(0.0, outer, math.inf).value if has_far else 0.0
        far_first = (
            profile.moment(1.0, outer, math.inf).value
            if profile.cap > outer and regime == "full"
            else 0.0
        )
        for k, x in enumerate(x_all):
            fx = float(np.asarray(f(x[None, :]), dtype=float)[0])
            gx = np.asarray(grad(x[None, :]), dtype=float)[0]
            for w, s in zip(component.directions, component.weights):
                if s == 0:
                    continue
                slope = float(gx @ w)
                moved = x[None, :] + r[:, None] * w[None, :]
                shifted = np.asarray(f(moved), dtype=float)
                body = float(np.sum(rho_w * (shifted - fx - chi * r * slope)))
                if regime == "none":
                    closure = slope * near_first
                else:
                    closure = 0.5 * _second_difference(f, x, w, 1e-4) * near
                far = -fx * far_mass - slope * far_first
                result[k] += sign * s * (body + closure + far)
    return result


def continuity_ratio_audit(
    pi: LevyMeasure, mu: LevyMeasure, corpus: Sequence[Field], p: float
) -> CheckReport:
    """
    Ratios |L^pi v|_{L_p} / |L^mu v|_{L_p} over a corpus, on its grid and refined.

    The fitted constant is the largest ratio; it passes when grid doubling
    moves it by at most 10%.
    """
    if not corpus:
        raise ParameterError("continuity audit needs a nonempty corpus")

    def constant(fields: Sequence[Field]) -> tuple[float, int]:
        grid = fields[0].grid
        m_pi, m_mu = symbol(pi, grid), symbol(mu, grid)
        ratios = [
            apply_multiplier(m_pi, v).lp_norm(p) / apply_multiplier(m_mu, v).lp_norm(p)
            for v in fields
        ]
        worst = int(np.argmax(ratios))
        return float(ratios[worst]), worst

    coarse, worst = constant(corpus)
    fine, _ = constant([v.upsampled() for v in corpus])
    drift = abs(fine / coarse - 1.0)
    passed = drift <= 0.1
    logger.info("operator continuity constant %.4g (refined %.4g)", coarse, fine)
    return CheckReport(
        name="prol",
        value=coarse,
        bound=math.inf,
        passed=passed,
        worst_point=worst,
        details={"refined": fine, "drift": drift, "p": p},
        diagnostic="" if passed else f"constant moved by {drift:.3g} under refinement",
    )


def save_multiplier(m: SpectralMultiplier, path: Path, measure_key: str = "") -> Path:
    """Little-endian complex128 values at path.bin with a JSON sidecar at path.json."""
    data = path.with_suffix(".bin")
    data.parent.mkdir(parents=True, exist_ok=True)
    np.ascontiguousarray(m.values, dtype="<c16").tofile(data)
    write_json(
        path.with_suffix(".json"),
        {
            "grid": {"d": m.grid.d, "n": m.grid.n, "L": m.grid.L},
            "label": m.label,
            "measure_key": measure_key,
            "dtype": "<c16",
            "order": "fft",
        },
    )
    return data


def load_multiplier(path: Path) -> SpectralMultiplier:
    """Inverse of save_multiplier."""
    sidecar = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
    grid = GridSpec(**sidecar["grid"])
    values = np.fromfile(path.with_suffix(".bin"), dtype="<c16").reshape(grid.shape)
    return SpectralMultiplier(grid, values.astype(complex), sidecar["label"])
