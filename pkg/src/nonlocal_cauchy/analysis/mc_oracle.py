"""Monte Carlo simulation of Z^pi and the probabilistic oracles built on it.

Jumps larger than the cut eps form a compound Poisson process over the
angular atoms. Smaller jumps are dropped for sigma < 1 and replaced by a
Gaussian with their covariance for sigma >= 1. Paths are generated in
blocks, each from its own Philox stream, so results do not depend on the
number of worker threads.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np
import numpy.typing as npt
from scipy import stats

from nonlocal_cauchy.analysis.assumptions import check_outer_exponent
from nonlocal_cauchy.analysis.cauchy_solver import TimeSeriesField
from nonlocal_cauchy.analysis.density_kernels import density
from nonlocal_cauchy.analysis.levy_measure import (
    LevyMeasure,
    MeasureKind,
    RadialProfile,
    directional_second_moment,
    radial_moment,
)
from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.grid import Field, GridSpec
from nonlocal_cauchy.common.quadrature import log_edges, loglog_fit, panel_rule
from nonlocal_cauchy.common.reports import CheckReport

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

BIAS_TARGET = 1e-3
CUT_LADDER = 10.0 ** (-np.arange(49) / 4.0)
JUMP_BUDGET = 4_000_000
MAX_BLOCK = 4096
MIN_FK_PATHS = 100
TABLE_PER_DECADE = 32
TABLE_ORDER = 8
TABLE_SPAN = 1e8
HISTOGRAM_BINS = {1: 64, 2: 8, 3: 4}
MIN_EXPECTED = 5.0
HISTOGRAM_LEVEL = 0.01
ENVELOPE_SLOPE = 0.05
Z_95 = 1.96


class RadialSampler:
    """
    Inverse-CDF sampling of a radial density restricted to (lo, hi].

    Power laws use the closed-form inverse; other profiles a cumulative
    table on log-spaced panels with a power tail beyond the table.
    """

    def __init__(self, profile: RadialProfile, lo: float) -> None:
        self.lo = max(lo, profile.floor)
        self.hi = profile.cap
        self.power = profile.power
        self.mass = profile.moment(0.0, self.lo, self.hi).value
        if not math.isfinite(self.mass):
            raise ParameterError(
                f"jump rate above {self.lo:g} is infinite for {profile.label}"
            )
        if self.power is None and self.mass > 0:
            self._tabulate(profile)

    def _tabulate(self, profile: RadialProfile) -> None:
        end = min(self.hi, max(TABLE_SPAN, 10.0 * self.lo))
        edges = log_edges(self.lo, end, TABLE_PER_DECADE)
        nodes, weights = panel_rule(edges, TABLE_ORDER)
        masses = (weights * profile.density(nodes)).reshape(-1, TABLE_ORDER).sum(axis=1)
        self._log_edges = np.log(edges)
        self._cumulative = np.concatenate([[0.0], np.cumsum(masses)])
        self._table_end = end
        self._tail_mass = max(self.mass - float(self._cumulative[-1]), 0.0)
        self._tail_beta = max(float(profile.exponent(np.array([end]))[0]), 1e-3)

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        u = rng.random(size)
        if self.power is not None:
            beta = self.power
            lower = self.lo ** (-beta)
            upper = 0.0 if math.isinf(self.hi) else self.hi ** (-beta)
            return (lower - u * (lower - upper)) ** (-1.0 / beta)
        target = u * (self._cumulative[-1] + self._tail_mass)
        inside = target < self._cumulative[-1]
        radii = np.empty(size)
        radii[inside] = np.exp(
            np.interp(target[inside], self._cumulative, self._log_edges)
        )
        if self._tail_mass > 0:
            excess = (target[~inside] - self._cumulative[-1]) / self._tail_mass
            tail = self._table_end * (1.0 - excess) ** (-1.0 / self._tail_beta)
            radii[~inside] = np.minimum(tail, self.hi)
        else:
            radii[~inside] = self._table_end
        return radii


@dataclass(frozen=True, eq=False)
class PathSampler:
    """
    Compound Poisson approximation of Z^pi with jumps above ``jump_cut``.

    ``bias_bound`` is int_{|y|<=eps} |y| dpi for sigma < 1, where small jumps
    are dropped, and int_{|y|<=eps} |y|^3 dpi when they are replaced by the
    Gaussian with covariance ``small_jump_cov``.
    """

    measure: LevyMeasure
    jump_cut: float
    drift: FloatArray
    small_jump_cov: FloatArray
    seed: int
    bias_bound: float
    directions: FloatArray
    rates: FloatArray
    radial: tuple[RadialSampler, ...]
    owner: npt.NDArray[np.int64]
    root: FloatArray = field(repr=False)

    @property
    def d(self) -> int:
        return self.measure.d

    @property
    def gaussian(self) -> bool:
        return self.measure.sigma >= 1

    @property
    def total_rate(self) -> float:
        return float(self.rates.sum())

    def block_size(self, horizon: float) -> int:
        """Paths per block; it depends on the sampler and the horizon only."""
        expected = max(1.0, self.total_rate * horizon)
        return int(min(MAX_BLOCK, max(1, JUMP_BUDGET // int(math.ceil(expected)))))


def _bias_moment(pi: LevyMeasure, eps: float) -> float:
    order = 3.0 if pi.sigma >= 1 else 1.0
    return radial_moment(pi, order, 0.0, eps).value


def default_jump_cut(pi: LevyMeasure, bias_target: float = BIAS_TARGET) -> float:
    """
    Largest eps = 10^(-k/4), k = 0..48, whose bias moment is at most the target.

    Raises:
        ParameterError: If no cut on the ladder reaches the target
    """
    for eps in CUT_LADDER:
        if _bias_moment(pi, float(eps)) <= bias_target:
            return float(eps)
    raise ParameterError(f"no jump cut down to 1e-12 reaches bias {bias_target:g}")


def build_sampler(
    pi: LevyMeasure, seed: int, jump_cut: Optional[float] = None
) -> PathSampler:
    """
    Args:
        pi: Measure of the process; difference measures are refused
        seed: Philox key in [0, 2^64)
        jump_cut: Small-jump threshold eps; chosen by default_jump_cut if absent

    Returns:
        PathSampler with rates, drift and small-jump covariance for eps

    Raises:
        ParameterError: For eps <= 0, a negative seed or a difference measure
    """
    if pi.kind is MeasureKind.DIFFERENCE:
        raise ParameterError("difference measures do not generate a process")
    if not 0 <= seed < 2**64:
        raise ParameterError(f"seed must lie in [0, 2^64), got {seed}")
    eps = default_jump_cut(pi) if jump_cut is None else float(jump_cut)
    if not eps > 0:
        raise ParameterError(f"jump cut must be positive, got {eps}: infinite rate")
    radial = []
    directions, rates, owner = [], [], []
    drift = np.zeros(pi.d)
    drift_hi = {"none": 0.0, "unit_ball": 1.0, "full": math.inf}[pi.compensator]
    for index, component in enumerate(pi.components):
        table = RadialSampler(component.profile, eps)
        radial.append(table)
        directions.append(component.directions)
        rates.append(component.weights * table.mass)
        owner.append(np.full(component.weights.shape, index))
        if drift_hi > eps:
            first = component.profile.moment(1.0, eps, drift_hi).value
            drift -= first * (component.weights @ component.directions)
    cov = directional_second_moment(pi, eps) if pi.sigma >= 1 else np.zeros((pi.d,) * 2)
    values, vectors = np.linalg.eigh(cov)
    root = vectors * np.sqrt(np.clip(values, 0.0, None))
    sampler = PathSampler(
        measure=pi,
        jump_cut=eps,
        drift=drift,
        small_jump_cov=cov,
        seed=int(seed),
        bias_bound=_bias_moment(pi, eps),
        directions=np.concatenate(directions) if directions else np.zeros((0, pi.d)),
        rates=np.concatenate(rates) if rates else np.zeros(0),
        radial=tuple(radial),
        owner=np.concatenate(owner) if owner else np.zeros(0, dtype=np.int64),
        root=root,
    )
    logger.info(
        "sampler eps=%.3g rate=%.4g bias=%.3g gaussian=%s",
        eps,
        sampler.total_rate,
        sampler.bias_bound,
        sampler.gaussian,
    )
    return sampler


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, block, 0]))


def _increments(
    sampler: PathSampler, times: FloatArray, rng: np.random.Generator
) -> FloatArray:
    """Independent samples of Z at the given per-path times."""
    m = times.size
    out = np.multiply.outer(times, sampler.drift)
    if sampler.gaussian:
        noise = rng.standard_normal((m, sampler.d)) @ sampler.root.T
        out += np.sqrt(times)[:, None] * noise
    counts = rng.poisson(np.multiply.outer(times, sampler.rates))
    owners = np.arange(m)
    for atom in range(sampler.rates.size):
        column = counts[:, atom]
        total = int(column.sum())
        if total == 0:
            continue
        radii = sampler.radial[sampler.owner[atom]].sample(rng, total)
        sums = np.bincount(np.repeat(owners, column), weights=radii, minlength=m)
        out += np.multiply.outer(sums, sampler.directions[atom])
    return out


def _run_blocks(
    n_paths: int,
    block: int,
    threads: int,
    work: Callable[[int, int, int], Any],
) -> list[Any]:
    """work(block index, first path, path count) over all blocks, in order."""
    starts = range(0, n_paths, block)
    jobs = [(b, start, min(block, n_paths - start)) for b, start in enumerate(starts)]
    if threads <= 1 or len(jobs) == 1:
        return [work(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: work(*job), jobs))


def sample_paths(
    sampler: PathSampler, t: float, n_paths: int, threads: int = 1
) -> FloatArray:
    """
    n_paths independent samples of Z_t, shape (n_paths, d).

    Raises:
        ParameterError: For n_paths < 1 or t < 0
    """
    if n_paths < 1:
        raise ParameterError(f"n_paths must be positive, got {n_paths}")
    if t < 0:
        raise ParameterError(f"time must be nonnegative, got {t}")

    def work(block: int, _start: int, count: int) -> FloatArray:
        rng = _block_rng(sampler.seed, block)
        return _increments(sampler, np.full(count, float(t)), rng)

    parts = _run_blocks(n_paths, sampler.block_size(t), threads, work)
    return np.concatenate(parts)


def ks_distance(
    samples: npt.ArrayLike, cdf: Callable[[FloatArray], FloatArray]
) -> float:
    """Kolmogorov-Smirnov distance of one-dimensional samples to a CDF."""
    values = np.asarray(samples, dtype=float).ravel()
    return float(stats.kstest(values, cdf).statistic)


def _merge_bins(
    observed: FloatArray, expected: FloatArray
) -> tuple[FloatArray, FloatArray]:
    merged_obs, merged_exp = [], []
    acc_obs = acc_exp = 0.0
    for o, e in zip(observed, expected):
        acc_obs += o
        acc_exp += e
        if acc_exp >= MIN_EXPECTED:
            merged_obs.append(acc_obs)
            merged_exp.append(acc_exp)
            acc_obs = acc_exp = 0.0
    if acc_exp > 0 or acc_obs > 0:
        if merged_exp:
            merged_obs[-1] += acc_obs
            merged_exp[-1] += acc_exp
        else:
            merged_obs.append(acc_obs)
            merged_exp.append(acc_exp)
    return np.array(merged_obs), np.array(merged_exp)


def histogram_consistency(
    sampler: PathSampler, grid: GridSpec, t: float, n_paths: int, threads: int = 1
) -> CheckReport:
    """
    Chi-square test of wrapped samples against the density on the grid.

    Bins are blocks of grid cells centred on the grid points: 64 bins in one
    dimension, 8 x 8 and 4 x 4 x 4 in two and three. Bins expecting fewer
    than five samples are merged with their neighbours.
    """
    per_axis = HISTOGRAM_BINS[grid.d]
    if grid.n % per_axis:
        raise ParameterError(f"{grid.n} points per axis do not split into {per_axis}")
    p = density(sampler.measure, t, grid).to_physical().values.real
    cells = grid.n // per_axis
    shape = sum(((per_axis, cells) for _ in range(grid.d)), ())
    mass = np.clip(p, 0.0, None).reshape(shape) * grid.cell_volume
    expected = mass.sum(axis=tuple(range(1, 2 * grid.d, 2))).ravel()
    samples = sample_paths(sampler, t, n_paths, threads)
    shift = grid.L / 2.0 + grid.h / 2.0
    cell = np.floor(np.mod(samples + shift, grid.L) / grid.h).astype(np.int64)
    index = np.ravel_multi_index(
        tuple(np.clip(cell[:, k], 0, grid.n - 1) // cells for k in range(grid.d)),
        (per_axis,) * grid.d,
    )
    observed = np.bincount(index, minlength=per_axis**grid.d).astype(float)
    expected = expected * n_paths / expected.sum()
    merged_obs, merged_exp = _merge_bins(observed, expected)
    result = stats.chisquare(merged_obs, merged_exp)
    p_value = float(result.pvalue)
    passed = p_value > HISTOGRAM_LEVEL
    return CheckReport(
        name="mc_histogram",
        value=p_value,
        bound=HISTOGRAM_LEVEL,
        passed=passed,
        details={
            "statistic": float(result.statistic),
            "bins": int(merged_obs.size),
            "t": t,
            "n_paths": n_paths,
        },
        diagnostic="" if passed else "samples disagree with the computed density",
    )


def moment_audit(
    sampler: PathSampler,
    alpha2: float,
    t_grid: Sequence[float],
    n_paths: int,
    threads: int = 1,
) -> CheckReport:
    """
    Monte Carlo envelope of E|Z_t|^alpha2 / (1 + t).

    The upper 95% confidence value is fitted against log t; a slope above
    0.05 means growth faster than 1 + t. The reported value is the largest
    upper envelope, a fitted constant C.

    Raises:
        AssumptionRegimeError: If alpha2 is outside the range for the order
        ParameterError: For non-positive times
    """
    check_outer_exponent(sampler.measure.sigma, alpha2)
    times = np.asarray(t_grid, dtype=float)
    if times.size < 2 or np.any(times <= 0):
        raise ParameterError("moment audit needs two or more positive times")
    rows = []
    for t in times:
        samples = sample_paths(sampler, float(t), n_paths, threads)
        powers = np.linalg.norm(samples, axis=1) ** alpha2
        mean = float(powers.mean())
        stderr = float(powers.std(ddof=1) / math.sqrt(n_paths)) if n_paths > 1 else 0.0
        rows.append(
            {
                "t": float(t),
                "estimate": mean,
                "stderr": stderr,
                "upper": (mean + Z_95 * stderr) / (1.0 + t),
            }
        )
    upper = np.array([row["upper"] for row in rows])
    if np.all(upper > 0):
        slope = loglog_fit(times, upper).slope
    else:
        slope = 0.0
    passed = slope <= ENVELOPE_SLOPE
    return CheckReport(
        name="al00",
        value=float(upper.max()),
        bound=math.inf,
        passed=passed,
        worst_point=float(times[int(np.argmax(upper))]),
        details={"slope": slope, "alpha2": alpha2, "per_t": rows},
        diagnostic="" if passed else f"envelope grows with log-slope {slope:.3g}",
    )


@dataclass(frozen=True)
class FeynmanKacEstimate:
    """Monte Carlo value of u(t, x) at one probe."""

    probe: tuple[float, ...]
    estimate: float
    stderr: float
    bias_bound: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "probe": list(self.probe),
            "estimate": self.estimate,
            "stderr": self.stderr,
            "bias_bound": self.bias_bound,
        }


def _derivative_bound(f: Field, order: int) -> float:
    """sum |2 pi xi|^order |f^(xi)| / L^d, a sup bound for order-th derivatives."""
    spectrum = np.abs(f.to_frequency().values)
    weight = (2.0 * math.pi * f.grid.frequency_radius) ** order
    return float(np.sum(weight * spectrum) / f.grid.L**f.grid.d)


def feynman_kac(
    sampler: PathSampler,
    lam: float,
    f: Optional[TimeSeriesField],
    g: Optional[Field],
    t: float,
    probes: npt.ArrayLike,
    n_paths: int,
    threads: int = 1,
) -> list[FeynmanKacEstimate]:
    """
    e^{-lambda t} E g(x + Z_t) + int_0^t e^{-lambda (t-s)} E f(s, x + Z_{t-s}) ds.

    Path i draws s_i uniformly in its stratum [t i / n, t (i + 1) / n), then
    Z_{t - s_i}, and reaches Z_t with an independent increment over s_i, so
    both terms share one path. All probes use the same paths.

    Args:
        sampler: Path sampler of the generator
        lam: Damping lambda >= 0
        f: Source on times covering [0, t], or None
        g: Initial datum, or None
        t: Evaluation time
        probes: Points of shape (k, d)
        n_paths: Number of paths, at least 100
        threads: Worker threads for the path blocks

    Returns:
        One estimate per probe

    Raises:
        ParameterError: For fewer than 100 paths or a negative time
    """
    if n_paths < MIN_FK_PATHS:
        raise ParameterError(
            f"at least {MIN_FK_PATHS} paths are needed for a standard error"
        )
    if t < 0 or lam < 0:
        raise ParameterError("time and lambda must be nonnegative")
    x = np.asarray(probes, dtype=float).reshape(-1, sampler.d)

    def work(block: int, start: int, count: int) -> FloatArray:
        rng = _block_rng(sampler.seed, block)
        index = np.arange(start, start + count)
        s = t * (index + rng.random(count)) / n_paths
        tau = t - s
        early = _increments(sampler, tau, rng)
        late = early + _increments(sampler, s, rng)
        values = np.zeros((x.shape[0], count))
        for k, probe in enumerate(x):
            if g is not None:
                values[k] += math.exp(-lam * t) * np.real(g.interpolate(probe + late))
            if f is not None:
                source = np.real(f.interpolate(s, probe + early))
                values[k] += t * np.exp(-lam * tau) * source
        return values

    parts = _run_blocks(n_paths, sampler.block_size(t), threads, work)
    values = np.concatenate(parts, axis=1)
    means = values.mean(axis=1)
    stderrs = values.std(axis=1, ddof=1) / math.sqrt(n_paths)
    lipschitz = 0.0
    order = 3 if sampler.gaussian else 1
    if g is not None:
        lipschitz += _derivative_bound(g, order)
    if f is not None:
        lipschitz += t * max(_derivative_bound(item, order) for item in f.slices)
    bias = t * sampler.bias_bound * lipschitz
    return [
        FeynmanKacEstimate(tuple(probe.tolist()), float(m), float(e), bias)
        for probe, m, e in zip(x, means, stderrs)
    ]


def bias_audit(pi: LevyMeasure, eps_ladder: Sequence[float]) -> CheckReport:
    """
    The recorded small-jump bias along decreasing cuts.

    It must not increase as eps shrinks; the value is the bias at the
    smallest cut.
    """
    ladder = sorted((float(e) for e in eps_ladder), reverse=True)
    if not ladder or ladder[-1] <= 0:
        raise ParameterError("bias audit needs positive cuts")
    biases = [_bias_moment(pi, eps) for eps in ladder]
    steps = np.diff(biases)
    monotone = bool(np.all(steps <= 1e-15 * max(biases[0], 1.0)))
    finite = all(math.isfinite(b) for b in biases)
    return CheckReport(
        name="mc_bias",
        value=biases[-1],
        bound=BIAS_TARGET,
        passed=monotone and finite,
        details={"eps": ladder, "bias": biases},
        diagnostic="" if monotone and finite else "bias does not decrease with eps",
    )
