"""Littlewood-Paley partitions and the generalized Besov and Bessel-potential norms.

Norms come in two flavours that are equivalent on the corpus: weights
kappa(N^-j)^(-s) per frequency block, or the Bessel potential
J^s = (1 - psi^{mu_sym})^s of a reference measure mu.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import numpy.typing as npt
from scipy import integrate

from nonlocal_cauchy.analysis.levy_measure import LevyMeasure
from nonlocal_cauchy.analysis.scaling import ScalingTriple
from nonlocal_cauchy.analysis.symbol_calculus import bessel_multiplier, symbol_sym
from nonlocal_cauchy.common.errors import ConfigError, ParameterError
from nonlocal_cauchy.common.grid import Field, GridSpec, Space, require_same_grid
from nonlocal_cauchy.common.reports import CheckReport, NormReport

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
NormFunction = Callable[[Field, "NormContext"], float]

VARIANTS = ("kappa_weighted", "bessel_weighted", "fractional")
T_PANELS = 64
T_LOWEST = 1e-4
Y_POINTS = 32
EQUIVALENCE_DRIFT = 0.1


def _bump(t: FloatArray) -> FloatArray:
    """exp(-1 / (1 - t^2)) on (-1, 1), zero elsewhere."""
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def _lp(values: npt.NDArray[np.generic], grid: GridSpec, p: float) -> float:
    return float(np.sum(np.abs(values) ** p) * grid.cell_volume) ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class LPPartition:
    """
    Frequency profiles phi_0, ..., phi_jmax on a grid's lattice.

    For j >= 1 the profile phi_j(xi) = phi(N^-j xi) lives on
    N^(j-1) < |xi| < N^(j+1); phi_0 collects the rest, so the blocks sum to
    one on every lattice frequency.
    """

    N: int
    grid: GridSpec
    blocks: tuple[FloatArray, ...]

    @property
    def j_max(self) -> int:
        return len(self.blocks) - 1

    @property
    def coverage_radius(self) -> float:
        return float(self.N**self.j_max)

    def tilde(self, j: int) -> FloatArray:
        """phi_(j-1) + phi_j + phi_(j+1), equal to one on the support of phi_j."""
        total = np.zeros(self.grid.shape)
        for k in (j - 1, j, j + 1):
            if 0 <= k <= self.j_max:
                total = total + self.blocks[k]
        return total

    def split(self, f: Field) -> list[Field]:
        """Physical-space pieces phi_j * f."""
        require_same_grid(self.grid, f.grid)
        spectrum = f.to_frequency()
        return [
            spectrum.with_values(spectrum.values * block).to_physical()
            for block in self.blocks
        ]


def build_partition(N: int, grid: GridSpec) -> LPPartition:
    """
    Littlewood-Paley partition with base N on the grid.

    phi(xi) = rho(|xi|) / sum_k rho(N^-k |xi|) with rho the standard
    mollifier profile in log_N |xi|, positive on (1/N, N). The last block
    reaches N^jmax, jmax = ceil(log_N of the largest lattice radius).

    Raises:
        ConfigError: If N < 2 or the grid resolves fewer than three blocks
    """
    if N < 2:
        raise ConfigError(f"partition base must be an integer >= 2, got {N}")
    radius = grid.frequency_radius
    top = float(radius.max())
    j_max = max(0, math.ceil(math.log(top) / math.log(N) - 1e-12))
    if j_max < 2:
        raise ConfigError(
            f"base N={N} leaves only {j_max + 1} blocks below the grid radius {top:.4g}"
        )
    positive = radius > 0
    t = np.log(np.where(positive, radius, 1.0)) / math.log(N)
    offset = t - np.floor(t)
    norm = _bump(offset) + _bump(offset - 1.0)
    blocks: list[FloatArray] = [np.zeros(grid.shape)]
    for j in range(1, j_max + 1):
        blocks.append(np.where(positive, _bump(t - j) / norm, 0.0))
    blocks[0] = 1.0 - np.sum(blocks[1:], axis=0)
    logger.debug("partition N=%d with %d blocks on %s", N, j_max + 1, grid)
    return LPPartition(N, grid, tuple(blocks))


@dataclass(frozen=True, eq=False)
class NormContext:
    """Grid, reference measure, scaling triple and partition shared by the norms."""

    grid: GridSpec
    mu: LevyMeasure
    kappa: ScalingTriple
    partition: LPPartition
    alpha1: float
    _bessel: dict[float, FloatArray] = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls,
        grid: GridSpec,
        mu: LevyMeasure,
        kappa: ScalingTriple,
        N: int = 2,
        alpha1: Optional[float] = None,
    ) -> "NormContext":
        """
        Args:
            grid: Grid of the fields
            mu: Reference measure of the Bessel potentials
            kappa: Scaling triple of the block weights
            N: Partition base
            alpha1: Exponent in the difference-norm condition m > s alpha1;
                the top of the admissible range for the order of mu when absent
        """
        if mu.d != grid.d:
            raise ParameterError(f"measure lives in d={mu.d}, grid in d={grid.d}")
        if alpha1 is None:
            alpha1 = 1.0 if mu.sigma < 1 else 2.0
        return cls(grid, mu, kappa, build_partition(N, grid), alpha1)

    @property
    def N(self) -> int:
        return self.partition.N

    def refined(self) -> "NormContext":
        fine = self.grid.refined()
        return NormContext.build(fine, self.mu, self.kappa, self.N, self.alpha1)

    def weight(self, j: int, s: float) -> float:
        """kappa(N^-j)^(-s)."""
        return self.kappa.kappa_at(float(self.N) ** (-j)) ** (-s)

    def bessel(self, s: float) -> FloatArray:
        """Values of J^s on the lattice."""
        if s not in self._bessel:
            self._bessel[s] = bessel_multiplier(self.mu, s, self.grid).values.real
        return self._bessel[s]


def _check_exponents(s: float, p: float, q: Optional[float] = None) -> None:
    if not math.isfinite(s):
        raise ParameterError(f"smoothness must be finite, got {s}")
    if not 1 < p < math.inf:
        raise ParameterError(f"integrability p must lie in (1, inf), got {p}")
    if q is not None and not 1 < q < math.inf:
        raise ParameterError(f"summability q must lie in (1, inf), got {q}")


def _check_variant(variant: str, allowed: Sequence[str]) -> None:
    if variant not in allowed:
        raise ParameterError(
            f"unknown variant {variant!r}; choose from {list(allowed)}"
        )


def _multiplied(f: Field, values: FloatArray) -> Field:
    spectrum = f.to_frequency()
    return spectrum.with_values(spectrum.values * values).to_physical()


def besov_norm(
    f: Field, s: float, p: float, q: float, variant: str, ctx: NormContext
) -> NormReport:
    """
    (sum_j b_j^q)^(1/q) over the partition blocks.

    b_j is kappa(N^-j)^(-s) |phi_j * f|_p for ``kappa_weighted`` and
    |J^s (phi_j * f)|_p for ``bessel_weighted``.

    Raises:
        ParameterError: For exponents out of range or an unknown variant
    """
    _check_exponents(s, p, q)
    _check_variant(variant, VARIANTS[:2])
    require_same_grid(ctx.grid, f.grid)
    blocks = ctx.partition.split(f)
    if variant == "kappa_weighted":
        contributions = [ctx.weight(j, s) * b.lp_norm(p) for j, b in enumerate(blocks)]
    else:
        bessel = ctx.bessel(s)
        contributions = [_multiplied(b, bessel).lp_norm(p) for b in blocks]
    value = float(np.sum(np.asarray(contributions) ** q) ** (1.0 / q))
    return NormReport(
        name="besov",
        value=value,
        parameters={"s": s, "p": p, "q": q, "N": ctx.N, "variant": variant},
        block_contributions=contributions,
    )


def triebel_norm(
    f: Field, s: float, p: float, variant: str, ctx: NormContext
) -> NormReport:
    """
    Bessel-potential type norms.

    ``kappa_weighted`` is the square function
    |(sum_j |kappa(N^-j)^(-s) phi_j * f|^2)^(1/2)|_p, ``bessel_weighted`` is
    |J^s f|_p and ``fractional`` is |f|_p + |(-psi^{mu_sym})^s f|_p for s in (0, 1].
    """
    _check_exponents(s, p)
    _check_variant(variant, VARIANTS)
    require_same_grid(ctx.grid, f.grid)
    parameters = {"s": s, "p": p, "N": ctx.N, "variant": variant}
    if variant == "kappa_weighted":
        blocks = ctx.partition.split(f)
        weighted = [ctx.weight(j, s) * np.abs(b.values) for j, b in enumerate(blocks)]
        square = np.sqrt(np.sum(np.stack(weighted) ** 2, axis=0))
        contributions = [_lp(w, f.grid, p) for w in weighted]
        return NormReport("triebel", _lp(square, f.grid, p), parameters, contributions)
    if variant == "bessel_weighted":
        value = _multiplied(f, ctx.bessel(s)).lp_norm(p)
        return NormReport("triebel", value, parameters, [value])
    if not 0 < s <= 1:
        raise ParameterError(f"the fractional variant needs s in (0, 1], got {s}")
    magnitude = np.maximum(-symbol_sym(ctx.mu, ctx.grid).values.real, 0.0) ** s
    base = f.to_physical().lp_norm(p)
    top = _multiplied(f, magnitude).lp_norm(p)
    return NormReport("triebel", base + top, parameters, [base, top])


def _difference_symbol(
    grid: GridSpec, y: FloatArray, m: int
) -> npt.NDArray[np.complex128]:
    argument = sum(2.0 * math.pi * xi * c for xi, c in zip(grid.frequencies, y))
    return (np.exp(1j * argument) - 1.0) ** m


def _unit_ball_midpoints(d: int, points: int) -> tuple[FloatArray, float]:
    step = 2.0 / points
    axis = -1.0 + step * (np.arange(points) + 0.5)
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1)
    mesh = mesh.reshape(-1, d)
    inside = np.sum(mesh**2, axis=1) <= 1.0
    return mesh[inside], step**d


def difference_norm(
    f: Field,
    s: float,
    p: float,
    q: float,
    m: int,
    ctx: NormContext,
    aggregation: str = "besov",
    y_points: int = Y_POINTS,
) -> NormReport:
    """
    Norm through m-th differences: |f|_p plus the oscillation term.

    Q_t f(x) = integral over |y| <= 1 of |Delta^m_{ty} f(x)| dy, computed
    spectrally with the midpoint rule on the unit ball; the t-integral
    against kappa(t)^(-s) dt/t uses 64 logarithmic panels on [1e-4, 1].
    ``besov`` aggregates (int kappa^(-sq) |Q_t f|_p^q dt/t)^(1/q), ``triebel``
    takes |(int kappa^(-2s) (Q_t f)^2 dt/t)^(1/2)|_p.

    Raises:
        ParameterError: If m <= s * alpha1 (naming the least admissible m)
    """
    _check_exponents(s, p, q)
    _check_variant(aggregation, ("besov", "triebel"))
    if not s > 0:
        raise ParameterError(f"difference norms need s > 0, got {s}")
    if m <= s * ctx.alpha1:
        least = math.floor(s * ctx.alpha1) + 1
        raise ParameterError(
            f"difference order m={m} must exceed s*alpha1={s * ctx.alpha1:.4g}; "
            f"use m >= {least}"
        )
    require_same_grid(ctx.grid, f.grid)
    spectrum = f.to_frequency()
    ys, cell = _unit_ball_midpoints(f.grid.d, y_points)
    log_t = np.linspace(math.log(T_LOWEST), 0.0, T_PANELS + 1)
    ts = np.exp(0.5 * (log_t[:-1] + log_t[1:]))
    dlog = float(log_t[1] - log_t[0])
    oscillations = np.zeros((ts.size,) + f.grid.shape)
    for k, t in enumerate(ts):
        for y in ys:
            factor = _difference_symbol(f.grid, t * y, m)
            moved = spectrum.with_values(spectrum.values * factor).to_physical()
            oscillations[k] += np.abs(moved.values)
    oscillations *= cell
    weights = np.array([ctx.kappa.kappa_at(float(t)) ** (-s) for t in ts])
    weighted = weights.reshape((-1,) + (1,) * f.grid.d) * oscillations
    base = f.to_physical().lp_norm(p)
    if aggregation == "besov":
        per_t = np.array([_lp(w, f.grid, p) for w in weighted])
        top = float(np.sum(per_t**q) * dlog) ** (1.0 / q)
        contributions = per_t.tolist()
    else:
        top = _lp(np.sqrt(np.sum(weighted**2, axis=0) * dlog), f.grid, p)
        contributions = [top]
    return NormReport(
        name="difference",
        value=base + top,
        parameters={"s": s, "p": p, "q": q, "m": m, "N": ctx.N, "variant": aggregation},
        block_contributions=[base, *contributions],
    )


def space_time_norm(
    slices: Sequence[Field],
    times: npt.ArrayLike,
    s: float,
    p: float,
    ctx: NormContext,
    variant: str = "bessel_weighted",
) -> NormReport:
    """
    (int_0^T |u(t)|^p dt)^(1/p) of per-slice norms by the composite trapezoid rule.

    Raises:
        ParameterError: For fewer than two slices or non-uniform times
    """
    t = np.asarray(times, dtype=float)
    if len(slices) < 2 or t.shape != (len(slices),):
        raise ParameterError("space-time norms need two or more slices with times")
    steps = np.diff(t)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.max():
        raise ParameterError("time slices must be uniformly spaced")
    per_slice = np.array([triebel_norm(u, s, p, variant, ctx).value for u in slices])
    value = float(integrate.trapezoid(per_slice**p, t)) ** (1.0 / p)
    return NormReport(
        name="space_time",
        value=value,
        parameters={"s": s, "p": p, "variant": variant, "T": float(t[-1] - t[0])},
        block_contributions=per_slice.tolist(),
    )


def band_limited_corpus(
    grid: GridSpec, count: int, seed: int, max_radius: Optional[float] = None
) -> list[Field]:
    """
    Real random fields with spectra inside |xi| <= max_radius, unit L_2 norm.

    The default radius is half the Nyquist frequency, so the corpus survives
    grid doubling unchanged.
    """
    if count < 1:
        raise ParameterError(f"corpus size must be positive, got {count}")
    radius = 0.5 * grid.nyquist if max_radius is None else max_radius
    rng = np.random.default_rng(seed)
    mask = grid.frequency_radius <= radius
    corpus = []
    for _ in range(count):
        noise = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        sample = Field(grid, noise * mask, Space.FREQUENCY, False).to_physical()
        real = Field.from_values(grid, sample.values.real)
        corpus.append(real.scaled(1.0 / real.lp_norm(2.0)))
    return corpus


def _ratios(
    norm_a: NormFunction,
    norm_b: NormFunction,
    corpus: Sequence[Field],
    ctx: NormContext,
) -> FloatArray:
    return np.array([norm_a(f, ctx) / norm_b(f, ctx) for f in corpus])


def equivalence_audit(
    norm_a: NormFunction,
    norm_b: NormFunction,
    corpus: Sequence[Field],
    ctx: NormContext,
    name: str = "equivalence",
) -> CheckReport:
    """
    Empirical constants of norm_a ~ norm_b and their drift under grid doubling.

    Passes when the ratio interval [min, max] moves by at most 10% at both ends.
    """
    coarse = _ratios(norm_a, norm_b, corpus, ctx)
    if not (np.all(np.isfinite(coarse)) and np.all(coarse > 0)):
        return CheckReport(
            name, math.inf, EQUIVALENCE_DRIFT, False, diagnostic="degenerate norm ratio"
        )
    fine = _ratios(norm_a, norm_b, [f.upsampled() for f in corpus], ctx.refined())
    drift = max(
        abs(fine.min() / coarse.min() - 1.0),
        abs(fine.max() / coarse.max() - 1.0),
    )
    passed = drift <= EQUIVALENCE_DRIFT
    logger.info(
        "%s: ratios [%.4g, %.4g] -> [%.4g, %.4g] after refinement",
        name,
        coarse.min(),
        coarse.max(),
        fine.min(),
        fine.max(),
    )
    return CheckReport(
        name=name,
        value=float(drift),
        bound=EQUIVALENCE_DRIFT,
        passed=passed,
        details={
            "interval": [float(coarse.min()), float(coarse.max())],
            "refined_interval": [float(fine.min()), float(fine.max())],
        },
        diagnostic="" if passed else "equivalence constants drift under refinement",
    )


def embedding_audit(
    corpus: Sequence[Field],
    ctx: NormContext,
    s: float,
    eps: float,
    p: float,
    q: float,
) -> CheckReport:
    """
    Monotonicity in s and the embedding of B^(s+eps)_pq into H^s_p on the corpus.

    The kappa-weighted Besov norm at s - eps is bounded by kappa(1)^eps times
    the one at s; the report value is the worst observed ratio against that
    constant.
    """
    if not eps > 0:
        raise ParameterError(f"embedding gap must be positive, got {eps}")
    constant = ctx.kappa.kappa_at(1.0) ** eps
    monotone = []
    embedded = []
    for f in corpus:
        lower = besov_norm(f, s - eps, p, q, "kappa_weighted", ctx).value
        upper = besov_norm(f, s, p, q, "kappa_weighted", ctx).value
        monotone.append(lower / (constant * upper))
        h = triebel_norm(f, s, p, "kappa_weighted", ctx).value
        b = besov_norm(f, s + eps, p, q, "kappa_weighted", ctx).value
        embedded.append(h / b)
    worst = float(max(monotone))
    passed = worst <= 1.0 + 1e-12 and all(math.isfinite(r) for r in embedded)
    return CheckReport(
        name="embedding",
        value=worst,
        bound=1.0,
        passed=passed,
        details={"embedding_ratio_max": float(max(embedded)), "constant": constant},
        diagnostic="" if passed else "norms are not monotone in s",
    )


def kappa_weight_series(
    kappa: ScalingTriple, N: int, eps: float, terms: int = 200
) -> CheckReport:
    """
    Partial sums of sum_k kappa(N^-k)^eps and their geometric decay.

    The report value is the sum; ``ratio`` is the largest quotient of
    consecutive terms over the second half, which must stay below one.
    """
    if not eps > 0 or N < 2 or terms < 4:
        raise ParameterError("the weight series needs eps > 0, N >= 2 and 4+ terms")
    k = np.arange(terms, dtype=float)
    series = np.asarray(kappa.kappa(float(N) ** (-k)), dtype=float) ** eps
    tail = series[terms // 2 :]
    ratio = float(np.max(tail[1:] / tail[:-1])) if np.all(tail > 0) else 0.0
    total = float(np.sum(series))
    passed = math.isfinite(total) and ratio < 1.0
    partial = np.cumsum(series)[:: max(1, terms // 10)]
    return CheckReport(
        name="kappa_series",
        value=total,
        bound=math.inf,
        passed=passed,
        details={"ratio": ratio, "partial_sums": partial.tolist()},
        diagnostic="" if passed else "weights do not decay geometrically",
    )
