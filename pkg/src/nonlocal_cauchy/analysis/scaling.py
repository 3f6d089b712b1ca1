"""Scaling functions kappa, scaling factors l and their generalized inverses.

A scaling triple carries kappa with kappa(eps * r) <= l(eps) * kappa(r),
the factor l, gamma = inf{r : l(r) >= t} and a = inf{r : kappa(r) >= t}.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import numpy.typing as npt

from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.quadrature import linear_fit, log_slope
from nonlocal_cauchy.common.reports import CheckReport

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
ScalarFunction = Callable[[FloatArray], FloatArray]

TABLE_LO = 1e-12
TABLE_HI = 1e12
TABLE_POINTS = 2048
BISECTION_STEPS = 64
INVERSE_TOLERANCE = 1e-12
MAX_BASE = 1_000_000


class ScalingError(ParameterError):
    """Raised when a scaling function or factor is unusable."""


class GeneralizedInverse:
    """
    t -> inf{r > 0 : f(r) >= t} for a positive function f.

    f is tabulated on a 2048-point log grid over [1e-12, 1e12] and replaced by
    its running maximum; the bracket found by binary search is refined by
    geometric bisection. Outside the table the inverse follows the power law
    fitted at the nearest table end.
    """

    def __init__(self, func: ScalarFunction) -> None:
        self._func = func
        self._r = np.geomspace(TABLE_LO, TABLE_HI, TABLE_POINTS)
        self._envelope = np.maximum.accumulate(np.asarray(func(self._r), dtype=float))
        slopes = log_slope(func, np.array([TABLE_LO, TABLE_HI]))
        self._low_slope = float(slopes[0])
        self._high_slope = float(slopes[1])
        logger.debug(
            "inverse table built: end slopes %.4g / %.4g",
            self._low_slope,
            self._high_slope,
        )

    def __call__(self, t: npt.ArrayLike) -> FloatArray:
        values = np.asarray(t, dtype=float)
        flat = np.atleast_1d(values).ravel()
        out = np.empty_like(flat)
        env = self._envelope
        r = self._r

        below = flat <= env[0]
        above = flat > env[-1]
        inside = ~(below | above)

        if np.any(below):
            if self._low_slope > 0:
                out[below] = r[0] * (flat[below] / env[0]) ** (1.0 / self._low_slope)
            else:
                out[below] = 0.0
        if np.any(above):
            if self._high_slope > 0:
                out[above] = r[-1] * (flat[above] / env[-1]) ** (1.0 / self._high_slope)
            else:
                out[above] = math.inf
        if np.any(inside):
            target = flat[inside]
            idx = np.searchsorted(env, target, side="left")
            lo = r[idx - 1]
            hi = r[idx]
            floor_value = env[idx - 1]
            for _ in range(BISECTION_STEPS):
                mid = np.sqrt(lo * hi)
                ok = np.maximum(floor_value, self._func(mid)) >= target
                hi = np.where(ok, mid, hi)
                lo = np.where(ok, lo, mid)
            out[inside] = hi
        return out.reshape(values.shape)


@dataclass(frozen=True, eq=False)
class ScalingTriple:
    """Scaling function kappa, factor l, and the inverses gamma and a."""

    kappa: ScalarFunction
    ell: ScalarFunction
    gamma: ScalarFunction
    a_inv: ScalarFunction
    theta0: float
    theta1: float
    label: str

    def __post_init__(self) -> None:
        if self.theta1 > self.theta0 + 1e-12:
            raise ScalingError(
                "power exponents out of order: "
                f"theta1={self.theta1} > theta0={self.theta0}"
            )

    def kappa_at(self, r: float) -> float:
        """kappa at a single point."""
        return float(np.asarray(self.kappa(np.array([r])))[0])

    def a_at(self, t: float) -> float:
        """Generalized inverse a(t) at a single point."""
        return float(np.asarray(self.a_inv(np.array([t])))[0])

    def ell_at(self, eps: float) -> float:
        return float(np.asarray(self.ell(np.array([eps])))[0])


def power_exponents(ell: ScalarFunction) -> tuple[float, float, int]:
    """
    Exponents theta0 = log_N l(N) and theta1 = log_N(1 / l(1/N)).

    N is the smallest integer >= 2 with l(1/N) < 1.

    Returns:
        Tuple (theta0, theta1, N)

    Raises:
        ScalingError: If l(1/N) stays >= 1 for all N up to one million
    """
    base = 2
    while base <= MAX_BASE:
        if float(np.asarray(ell(np.array([1.0 / base])))[0]) < 1.0:
            break
        base += 1 if base < 64 else base // 8
    else:
        raise ScalingError("scaling factor never drops below 1 on (0, 1)")
    log_base = math.log(base)
    up = float(np.asarray(ell(np.array([float(base)])))[0])
    down = float(np.asarray(ell(np.array([1.0 / base])))[0])
    return math.log(up) / log_base, math.log(1.0 / down) / log_base, base


def build_triple(
    kappa: ScalarFunction,
    ell: ScalarFunction,
    label: str,
    gamma: Optional[ScalarFunction] = None,
    a_inv: Optional[ScalarFunction] = None,
) -> ScalingTriple:
    """
    Assemble a ScalingTriple, tabulating any inverse that is not given.

    Args:
        kappa: Scaling function
        ell: Scaling factor
        label: Identifier embedded in cache keys and reports
        gamma: Closed-form inverse of ell, if known
        a_inv: Closed-form inverse of kappa, if known

    Returns:
        ScalingTriple with fitted power exponents
    """
    theta0, theta1, base = power_exponents(ell)
    logger.debug(
        "triple %s: theta0=%.4g theta1=%.4g (N=%d)", label, theta0, theta1, base
    )
    return ScalingTriple(
        kappa=kappa,
        ell=ell,
        gamma=gamma if gamma is not None else GeneralizedInverse(ell),
        a_inv=a_inv if a_inv is not None else GeneralizedInverse(kappa),
        theta0=theta0,
        theta1=theta1,
        label=label,
    )


def power_law_triple(theta: float) -> ScalingTriple:
    """kappa(r) = r^theta with l(eps) = eps^theta and closed-form inverses."""
    if not theta > 0:
        raise ScalingError(f"power-law scaling needs theta > 0, got {theta}")

    def power(r: FloatArray) -> FloatArray:
        return np.asarray(r, dtype=float) ** theta

    def root(t: FloatArray) -> FloatArray:
        return np.asarray(t, dtype=float) ** (1.0 / theta)

    return build_triple(power, power, f"power(theta={theta!r})", gamma=root, a_inv=root)


def piecewise_power_ell(
    c1: float, delta1: float, delta2: float
) -> tuple[ScalarFunction, ScalarFunction]:
    """
    l(eps) = C1 eps^(2 delta1) for eps <= 1 and C1 eps^(2 delta2) above.

    The inverse is returned alongside.

    Returns:
        Tuple (ell, gamma)
    """
    low = 2.0 * delta1
    high = 2.0 * delta2

    def ell(eps: FloatArray) -> FloatArray:
        e = np.asarray(eps, dtype=float)
        return c1 * np.where(e <= 1.0, e**low, e**high)

    def gamma(t: FloatArray) -> FloatArray:
        x = np.asarray(t, dtype=float) / c1
        return np.where(x <= 1.0, x ** (1.0 / low), x ** (1.0 / high))

    return ell, gamma


def tabulated_triple(
    r_table: npt.ArrayLike, kappa_table: npt.ArrayLike, label: str = "table"
) -> ScalingTriple:
    """
    Scaling triple from a monotone kappa table.

    kappa is interpolated linearly in log-log coordinates and extended by the
    end slopes. l(eps) is the sup of kappa(eps r)/kappa(r) over a dense r grid,
    tabulated on an eps grid and read off at the next grid point upward, which
    keeps it an upper bound for nondecreasing l.
    """
    r = np.asarray(r_table, dtype=float)
    k = np.asarray(kappa_table, dtype=float)
    if r.ndim != 1 or r.size < 2 or r.shape != k.shape:
        raise ScalingError(
            "kappa table needs matching 1-d arrays with at least 2 points"
        )
    if np.any(np.diff(r) <= 0) or np.any(k <= 0) or np.any(np.diff(k) < 0):
        raise ScalingError(
            "kappa table must be increasing in r and nondecreasing in kappa"
        )
    log_r = np.log(r)
    log_k = np.log(k)
    low_slope = (log_k[1] - log_k[0]) / (log_r[1] - log_r[0])
    high_slope = (log_k[-1] - log_k[-2]) / (log_r[-1] - log_r[-2])
    if low_slope <= 0 or high_slope <= 0:
        raise ScalingError("kappa table must grow at both ends")

    def kappa(x: FloatArray) -> FloatArray:
        lx = np.log(np.asarray(x, dtype=float))
        inner = np.interp(lx, log_r, log_k)
        below = log_k[0] + low_slope * (lx - log_r[0])
        above = log_k[-1] + high_slope * (lx - log_r[-1])
        outer = np.where(lx > log_r[-1], above, inner)
        return np.exp(np.where(lx < log_r[0], below, outer))

    eps_grid = np.geomspace(1e-6, 1e6, 257)
    probe = np.geomspace(r[0] * 1e-3, r[-1] * 1e3, 512)
    ratios = kappa(np.outer(eps_grid, probe)) / kappa(probe)[None, :]
    ell_table = np.maximum.accumulate(ratios.max(axis=1))
    log_ell = np.log(ell_table)
    log_eps = np.log(eps_grid)
    end_low = float((log_ell[1] - log_ell[0]) / (log_eps[1] - log_eps[0]))
    end_high = float((log_ell[-1] - log_ell[-2]) / (log_eps[-1] - log_eps[-2]))

    def ell(eps: FloatArray) -> FloatArray:
        e = np.asarray(eps, dtype=float)
        idx = np.clip(np.searchsorted(eps_grid, e, side="left"), 0, eps_grid.size - 1)
        inside = ell_table[idx]
        below = ell_table[0] * (e / eps_grid[0]) ** max(end_low, 0.0)
        above = ell_table[-1] * (e / eps_grid[-1]) ** max(end_high, 0.0)
        outer = np.where(e > eps_grid[-1], above, inside)
        return np.where(e < eps_grid[0], below, outer)

    return build_triple(kappa, ell, label)


def _report_inequality(
    name: str, excess: FloatArray, points: list[tuple[float, ...]], tolerance: float
) -> CheckReport:
    worst = int(np.argmax(excess))
    value = float(excess.ravel()[worst])
    return CheckReport(
        name=name,
        value=value,
        bound=tolerance,
        passed=bool(value <= tolerance),
        worst_point=list(points[worst]),
    )


def audit_scaling(
    triple: ScalingTriple,
    sigma_hat: Optional[float] = None,
    eps_grid: Optional[FloatArray] = None,
    r_grid: Optional[FloatArray] = None,
) -> list[CheckReport]:
    """
    Numerical audit of the scaling-triple invariants.

    Checks the scaling inequality on a log grid of (eps, r), the limits of
    kappa at the grid extremes, generalized-inverse consistency, the two-sided
    power bounds with a fitted constant, a(eps r) >= a(r) gamma(eps), and,
    when an order estimate is given, the decay of A^sigma' / kappa(A) as A -> 0.

    Args:
        triple: Scaling triple to audit
        sigma_hat: Estimated order; enables the decay check with
            sigma' = sigma_hat + 0.1
        eps_grid: Grid of eps values (default 50 points over [1e-3, 1e3])
        r_grid: Grid of r values (default 50 points over [1e-3, 1e3])

    Returns:
        One CheckReport per property
    """
    default = np.geomspace(1e-3, 1e3, 50)
    eps = default if eps_grid is None else np.asarray(eps_grid, float)
    r = default if r_grid is None else np.asarray(r_grid, float)
    pairs = [(float(e), float(x)) for e in eps for x in r]
    e_col = np.array([p[0] for p in pairs])
    r_col = np.array([p[1] for p in pairs])
    reports = []

    kappa_r = triple.kappa(r_col)
    lhs = triple.kappa(e_col * r_col)
    rhs = triple.ell(e_col) * kappa_r
    reports.append(
        _report_inequality(
            "scaling_inequality", lhs / rhs - 1.0, pairs, INVERSE_TOLERANCE
        )
    )

    ends = triple.kappa(np.array([TABLE_LO, 1.0, TABLE_HI]))
    k_lo, k_one, k_hi = (float(v) for v in ends)
    limits_ok = k_lo < 1e-2 * k_one and k_hi > 1e2 * k_one
    reports.append(
        CheckReport(
            name="kappa_limits",
            value=k_lo / k_one,
            bound=1e-2,
            passed=limits_ok,
            worst_point=[TABLE_LO, TABLE_HI],
            details={"kappa_low": k_lo, "kappa_one": k_one, "kappa_high": k_hi},
            diagnostic=(
                ""
                if limits_ok
                else "kappa does not vanish at 0+ or blow up at infinity"
            ),
        )
    )

    t = np.geomspace(1e-6, 1e6, 200)
    a_t = triple.a_inv(t)
    gamma_t = triple.gamma(t)
    defects = np.concatenate(
        [
            1.0 - triple.kappa(a_t) / t,
            triple.a_inv(triple.kappa(r)) / r - 1.0,
            1.0 - triple.ell(gamma_t) / t,
        ]
    )
    labels = (
        [("kappa(a(t))>=t", float(v)) for v in t]
        + [("a(kappa(r))<=r", float(v)) for v in r]
        + [("l(gamma(t))>=t", float(v)) for v in t]
    )
    reports.append(
        _report_inequality("inverse_consistency", defects, labels, INVERSE_TOLERANCE)
    )

    upper = np.maximum(r**triple.theta0, r**triple.theta1)
    lower = np.minimum(r**triple.theta0, r**triple.theta1)
    kappa_grid = triple.kappa(r)
    c_bar = float(max(np.max(kappa_grid / upper), np.max(lower / kappa_grid), 1.0))
    reports.append(
        CheckReport(
            name="power_bounds",
            value=c_bar,
            bound=math.inf,
            passed=math.isfinite(c_bar),
            details={"theta0": triple.theta0, "theta1": triple.theta1},
        )
    )
    logger.info("%s: fitted power-bound constant %.4g", triple.label, c_bar)

    a_prod = triple.a_inv(e_col * r_col)
    a_bound = triple.a_inv(r_col) * triple.gamma(e_col)
    reports.append(
        _report_inequality("inverse_scaling", 1.0 - a_prod / a_bound, pairs, 1e-9)
    )

    if sigma_hat is not None:
        sigma_prime = sigma_hat + 0.1
        small = np.geomspace(1.0, 1e-10, 101)
        ratio = small**sigma_prime / triple.kappa(small)
        tail = ratio[-20:]
        monotone = bool(np.all(np.diff(tail) <= 1e-12 * tail[:-1]))
        decayed = bool(ratio[-1] < 0.5 * ratio[0])
        reports.append(
            CheckReport(
                name="order_decay",
                value=float(ratio[-1] / ratio[0]),
                bound=0.5,
                passed=monotone and decayed,
                worst_point=float(small[-1]),
                details={"sigma_prime": sigma_prime},
                diagnostic="" if monotone else "A^sigma'/kappa(A) tail is not monotone",
            )
        )

    for report in reports:
        if not report.passed:
            logger.warning(
                "%s: %s failed (value %.4g)", triple.label, report.name, report.value
            )
    return reports


def order_from_kappa(triple: ScalingTriple) -> float:
    """Regression estimate of the local power of kappa near 0 (used for defaults)."""
    small = np.geomspace(1e-10, 1e-6, 20)
    fit = linear_fit(np.log(small), np.log(triple.kappa(small)))
    return fit.slope
