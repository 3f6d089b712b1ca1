"""Numerical verifiers for the structural assumptions on pi, mu0 and kappa.

B bounds the moments of the rescaled measures kappa(R) pi_R uniformly in R,
D asks these measures to dominate a fixed small-ball measure mu0, A0 asks
mu0 to be nondegenerate with an integrable Fourier weight and G is the
angular nondegeneracy of the density factor in the Bernstein examples.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import numpy.typing as npt

from nonlocal_cauchy.analysis.levy_measure import (
    AngularComponent,
    LevyMeasure,
    MeasureKind,
    MeasureMismatchError,
    RadialProfile,
    common_atoms,
    directional_density,
    directional_second_moment,
    radial_moment,
    scale_measure,
    sphere_design,
    truncate,
)
from nonlocal_cauchy.analysis.scaling import ScalingTriple
from nonlocal_cauchy.analysis.symbol_calculus import evaluate_symbol
from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.quadrature import gauss_legendre
from nonlocal_cauchy.common.reports import CheckReport

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
AngularFunction = Callable[[FloatArray], FloatArray]

DEFAULT_R_GRID = np.geomspace(1e-3, 1e3, 25)
DOMINATION_RADII = np.geomspace(1e-6, 1.0, 61)
FOURIER_START = 1.0
FOURIER_DOUBLINGS = 40
FOURIER_TOLERANCE = 1e-4
FIT_SAFETY = 1.0 - 1e-9


class AssumptionRegimeError(ParameterError):
    """Raised when exponents do not fit the regime table of the order sigma."""


@dataclass(frozen=True)
class AssumptionParams:
    """Exponents and constants of assumptions A0 and B."""

    alpha1: float
    alpha2: float
    n0: float = 1e6
    N0: float = 1e6
    c1: float = 1e-6

    def check_regime(self, sigma: float) -> None:
        """
        Validate (alpha1, alpha2) against the order.

        sigma < 1: both in (0, 1]; sigma > 1: both in (1, 2];
        sigma = 1: alpha1 in (1, 2] and alpha2 in [0, 1).

        Raises:
            AssumptionRegimeError: If the exponents leave the table
        """
        a1 = self.alpha1
        if sigma < 1:
            ok = 0 < a1 <= 1
            rule = "alpha1 in (0, 1]"
        else:
            ok = 1 < a1 <= 2
            rule = "alpha1 in (1, 2]"
        if not ok:
            raise AssumptionRegimeError(f"order {sigma} needs {rule}, got alpha1={a1}")
        check_outer_exponent(sigma, self.alpha2)


def check_outer_exponent(sigma: float, alpha2: float) -> None:
    """
    Validate the large-jump moment exponent alpha2 against the order.

    Raises:
        AssumptionRegimeError: Unless alpha2 is in (0, 1] below order 1,
            in [0, 1) at order 1 or in (1, 2] above it
    """
    if sigma < 1:
        ok = 0 < alpha2 <= 1
        rule = "alpha2 in (0, 1]"
    elif sigma > 1:
        ok = 1 < alpha2 <= 2
        rule = "alpha2 in (1, 2]"
    else:
        ok = 0 <= alpha2 < 1
        rule = "alpha2 in [0, 1)"
    if not ok:
        raise AssumptionRegimeError(f"order {sigma} needs {rule}, got alpha2={alpha2}")


def check_assumption_B(
    pi: LevyMeasure,
    kappa: ScalingTriple,
    params: AssumptionParams,
    R_grid: Optional[Sequence[float]] = None,
) -> CheckReport:
    """
    Supremum over R of the small-ball alpha1-moment plus the outer alpha2-moment.

    Divergent quadratures turn into a failed report with the diagnostic of
    the offending piece.

    Raises:
        ParameterError: For an empty or nonpositive R grid
    """
    params.check_regime(pi.sigma)
    radii = np.asarray(DEFAULT_R_GRID if R_grid is None else R_grid, dtype=float)
    if radii.size == 0 or np.any(radii <= 0):
        raise ParameterError("assumption B needs a nonempty grid of positive R")
    values = []
    for R in radii:
        scaled = scale_measure(pi, float(R), kappa)
        small = radial_moment(scaled, params.alpha1, 0.0, 1.0)
        large = radial_moment(scaled, params.alpha2, 1.0, math.inf)
        if not (small.converged and large.converged):
            diagnostic = "; ".join(d for d in (small.diagnostic, large.diagnostic) if d)
            logger.info("B(kappa,l) fails at R=%g: %s", R, diagnostic)
            return CheckReport(
                name="B",
                value=math.inf,
                bound=params.N0,
                passed=False,
                worst_point=float(R),
                diagnostic=diagnostic or "moment quadrature did not converge",
            )
        values.append(small.value + large.value)
    worst = int(np.argmax(values))
    top = float(values[worst])
    spread = (top - min(values)) / top if top > 0 else 0.0
    passed = top <= params.N0
    logger.info("B(kappa,l): sup=%.6g (spread %.3g) vs N0=%.3g", top, spread, params.N0)
    return CheckReport(
        name="B",
        value=top,
        bound=params.N0,
        passed=passed,
        worst_point=float(radii[worst]),
        details={"spread": spread, "per_R": dict(zip(radii.tolist(), values))},
        diagnostic="" if passed else "moment supremum exceeds N0",
    )


def a0_lambda(mu0: LevyMeasure, radius: FloatArray) -> FloatArray:
    """
    The weight lambda(xi) of assumption A0 as a function of |xi|.

    For order >= 1 it is sum_i s_i [|xi| int_0^min(1, 1/|xi|) r^2 rho
    + int_1/|xi|^1 r rho]; below order 1 it vanishes.
    """
    r = np.asarray(radius, dtype=float)
    result = np.zeros_like(r)
    if mu0.sigma < 1:
        return result
    for component in mu0.components:
        mass = float(np.sum(component.weights))
        if mass == 0.0:
            continue
        profile = component.profile
        for k, x in enumerate(r.ravel()):
            if x == 0.0:
                continue
            edge = min(1.0, 1.0 / x)
            inner = profile.moment(2.0, 0.0, edge).value
            outer = profile.moment(1.0, edge, 1.0).value if edge < 1.0 else 0.0
            result.flat[k] += mass * (x * inner + outer)
    return result


def _fourier_weight_integral(
    mu0: LevyMeasure, ladder: FloatArray
) -> tuple[float, bool]:
    directions, weights = sphere_design(mu0.d)
    x, w = gauss_legendre(16)
    partial = [0.0]
    total = 0.0
    for lo, hi in zip(ladder[:-1], ladder[1:]):
        edges = np.linspace(lo, hi, 9)
        half = 0.5 * np.diff(edges)
        r = (edges[:-1, None] + half[:, None] * (x + 1.0)).ravel()
        rw = (half[:, None] * w).ravel()
        points = (r[:, None, None] * directions[None, :, :]).reshape(-1, mu0.d)
        psi0 = -evaluate_symbol(mu0, points, symmetric=True, check=False).real
        psi0 = psi0.reshape(r.size, directions.shape[0])
        lam = a0_lambda(mu0, r)
        radial = r**4 * (1.0 + lam) ** (mu0.d + 3) * r ** (mu0.d - 1)
        integrand = (rw * radial)[:, None] * np.exp(-psi0) * weights[None, :]
        piece = float(np.sum(integrand))
        total += piece
        partial.append(total)
        if total > 0 and piece <= FOURIER_TOLERANCE * total:
            if len(partial) >= 3:
                s0, s1, s2 = partial[-3:]
                denominator = (s2 - s1) - (s1 - s0)
                if denominator != 0.0 and abs(s2 - s1) < abs(s1 - s0):
                    total = s2 - (s2 - s1) ** 2 / denominator
            return total, True
    return math.inf, False


def check_assumption_A0(
    mu0: LevyMeasure,
    params: AssumptionParams,
    xi_grid: Optional[Sequence[float]] = None,
) -> CheckReport:
    """
    Second moment, Fourier weight integral and directional nondegeneracy of mu0.

    The Fourier integral of |xi|^4 [1 + lambda(xi)]^(d+3) exp(-psi0(xi)),
    psi0 = -Re psi^{mu0}, runs in polar form over the sphere design with
    radial cut-offs doubling along ``xi_grid`` until the last shell adds
    less than 1e-4 of the total; the partial sums are then Aitken
    extrapolated. The nondegeneracy is the smallest eigenvalue of the
    small-ball covariance, the minimum of int |xi . y|^2 dmu0 over the sphere.

    Returns:
        Report "A0": value = nondegeneracy vs c1; the other two quantities
        are compared with n0 and listed in details
    """
    if mu0.kind is MeasureKind.DIFFERENCE:
        raise ParameterError("mu0 must be a nonnegative measure")
    mu0 = truncate(mu0, 1.0)
    second = 0.0 if mu0.is_zero else radial_moment(mu0, 2.0, 0.0, 1.0).value
    if second == 0.0:
        return CheckReport(
            name="A0",
            value=0.0,
            bound=params.c1,
            passed=False,
            details={
                "second_moment": 0.0,
                "fourier_integral": 0.0,
                "nondegeneracy": 0.0,
            },
            diagnostic="mu0 vanishes on the unit ball",
        )
    matrix = directional_second_moment(mu0)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    nondegeneracy = max(float(eigenvalues[0]), 0.0)
    worst_direction = eigenvectors[:, 0].tolist()
    if nondegeneracy > 0:
        ladder = (
            np.asarray(xi_grid, dtype=float)
            if xi_grid is not None
            else FOURIER_START * 2.0 ** np.arange(FOURIER_DOUBLINGS + 1)
        )
        ladder = np.concatenate([[0.0], ladder[ladder > 0]])
        fourier, settled = _fourier_weight_integral(mu0, ladder)
    else:
        fourier, settled = math.inf, False
    failures = []
    if nondegeneracy < params.c1:
        failures.append(f"nondegeneracy {nondegeneracy:.3g} below c1={params.c1:.3g}")
    if not settled:
        failures.append("Fourier weight integral did not settle")
    if second > params.n0 or fourier > params.n0:
        failures.append(f"moments exceed n0={params.n0:.3g}")
    passed = not failures
    logger.info(
        "A0: second moment %.6g, Fourier integral %.6g, nondegeneracy %.6g",
        second,
        fourier,
        nondegeneracy,
    )
    return CheckReport(
        name="A0",
        value=nondegeneracy,
        bound=params.c1,
        passed=passed,
        worst_point=worst_direction,
        details={
            "second_moment": second,
            "fourier_integral": fourier,
            "nondegeneracy": nondegeneracy,
            "n0": params.n0,
        },
        diagnostic="; ".join(failures),
    )


def _atoms_of(pi: LevyMeasure) -> FloatArray:
    rows = [c.directions for _, _, c in pi.signed_components()]
    stacked = np.concatenate(rows) if rows else np.zeros((0, pi.d))
    _, first = np.unique(np.round(stacked, 12), axis=0, return_index=True)
    return stacked[np.sort(first)]


def check_assumption_D(
    pi: LevyMeasure,
    mu0: LevyMeasure,
    kappa: ScalingTriple,
    R_grid: Optional[Sequence[float]] = None,
    r_grid: Optional[Sequence[float]] = None,
) -> CheckReport:
    """
    Density-wise domination kappa(R) pi_R >= mu0 on the unit ball.

    For every R, every atom of mu0 and every r in (0, 1] the margin is
    1 - mu0 density / rescaled pi density; the report carries the worst one.

    Raises:
        MeasureMismatchError: If mu0 has atoms that pi does not have
    """
    if not common_atoms(pi, mu0):
        raise MeasureMismatchError(
            "mu0 has angular atoms outside the support of pi; project mu0 onto "
            "the common atoms before checking domination"
        )
    radii = np.asarray(DEFAULT_R_GRID if R_grid is None else R_grid, dtype=float)
    r = np.asarray(DOMINATION_RADII if r_grid is None else r_grid, dtype=float)
    atoms = _atoms_of(mu0)
    worst = math.inf
    where: dict[str, object] = {}
    for R in radii:
        scaled = scale_measure(pi, float(R), kappa)
        for w in atoms:
            lower = directional_density(mu0, w, r)
            upper = directional_density(scaled, w, r)
            active = lower > 0
            if not np.any(active):
                continue
            with np.errstate(divide="ignore"):
                ratio = lower[active] / upper[active]
            margin = np.where(upper[active] > 0, 1.0 - ratio, -np.inf)
            k = int(np.argmin(margin))
            if margin[k] < worst:
                worst = float(margin[k])
                where = {"R": float(R), "r": float(r[active][k]), "w": w.tolist()}
    if math.isinf(worst) and worst > 0:
        worst = 1.0
    passed = worst >= -1e-12
    logger.info("D(kappa,l): worst margin %.6g", worst)
    return CheckReport(
        name="D",
        value=worst,
        bound=0.0,
        passed=passed,
        worst_point=where or None,
        diagnostic="" if passed else "rescaled pi does not dominate mu0",
    )


def _merged_atoms(
    pi: LevyMeasure, rho0: Optional[AngularFunction]
) -> tuple[FloatArray, FloatArray]:
    directions = []
    weights = []
    for component in pi.components:
        directions.append(component.directions)
        weights.append(component.weights)
    w_all = np.concatenate(directions)
    s_all = np.concatenate(weights)
    _, first, inverse = np.unique(
        np.round(w_all, 12), axis=0, return_index=True, return_inverse=True
    )
    unique = w_all[first]
    merged = np.zeros(unique.shape[0])
    np.add.at(merged, np.asarray(inverse).ravel(), s_all)
    if rho0 is None:
        return unique, merged
    return unique, merged * np.asarray(rho0(unique), dtype=float)


def fit_mu0(
    pi: LevyMeasure,
    kappa: ScalingTriple,
    delta1: float,
    rho0: Optional[AngularFunction] = None,
    R_grid: Optional[Sequence[float]] = None,
    r_grid: Optional[Sequence[float]] = None,
) -> tuple[LevyMeasure, float]:
    """
    Small-ball measure c1 r^(-1-2 delta1) rho0(w) on the atoms of pi, c1 maximal.

    c1 is the infimum over (R, r, w) of the rescaled pi density divided by
    s_w rho0(w) r^(-1-2 delta1), shaved by a relative 1e-9.

    Returns:
        Tuple (mu0, c1)
    """
    if pi.kind is MeasureKind.DIFFERENCE:
        raise ParameterError("mu0 is fitted for nonnegative measures only")
    if not 0 < delta1 < 1:
        raise ParameterError(f"delta1 must lie in (0, 1), got {delta1}")
    directions, weights = _merged_atoms(pi, rho0)
    radii = np.asarray(DEFAULT_R_GRID if R_grid is None else R_grid, dtype=float)
    r = np.asarray(DOMINATION_RADII if r_grid is None else r_grid, dtype=float)
    shape = r ** (-1.0 - 2.0 * delta1)
    c1 = math.inf
    for R in radii:
        scaled = scale_measure(pi, float(R), kappa)
        for w, s in zip(directions, weights):
            if s <= 0:
                continue
            ratio = directional_density(scaled, w, r) / (s * shape)
            c1 = min(c1, float(ratio.min()))
    c1 = max(c1, 0.0) * FIT_SAFETY if math.isfinite(c1) else 0.0
    profile = RadialProfile.power_law(c1, 2.0 * delta1, cap=1.0)
    mu0 = LevyMeasure(
        kind=MeasureKind.RADIAL_ANGULAR_DENSITY,
        sigma=2.0 * delta1,
        d=pi.d,
        components=(AngularComponent(directions, weights, profile),),
        key=f"mu0({pi.key},delta1={delta1!r},c1={c1!r})",
    )
    logger.info("fitted mu0 constant c1=%.6g for %s", c1, pi.key)
    return mu0, c1


def check_assumption_G(
    pi: LevyMeasure, rho0: Optional[AngularFunction] = None
) -> CheckReport:
    """Smallest eigenvalue of sum_i s_i rho0(w_i) w_i w_i^T."""
    if pi.kind is MeasureKind.DIFFERENCE:
        raise ParameterError("assumption G concerns nonnegative measures")
    directions, weights = _merged_atoms(pi, rho0)
    matrix = (directions * weights[:, None]).T @ directions
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    value = float(eigenvalues[0])
    passed = value > 1e-12
    logger.info("G: angular nondegeneracy %.6g", value)
    return CheckReport(
        name="G",
        value=value,
        bound=0.0,
        passed=passed,
        worst_point=eigenvectors[:, 0].tolist(),
        diagnostic="" if passed else "angular weights miss a direction",
    )
