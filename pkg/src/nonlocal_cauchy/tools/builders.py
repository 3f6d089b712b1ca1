"""Turn a validated experiment configuration into measures, grids and problems."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from nonlocal_cauchy.analysis.assumptions import AssumptionParams
from nonlocal_cauchy.analysis.bernstein import (
    BernsteinFunction,
    BernsteinModel,
    bernstein_measure,
    catalog_function,
    constant_factor,
    from_levy_atoms,
)
from nonlocal_cauchy.analysis.cauchy_solver import CauchyProblem, TimeSeriesField
from nonlocal_cauchy.analysis.levy_measure import (
    LevyMeasure,
    RadialProfile,
    difference,
    radial_angular_measure,
    reweight,
    stable_measure,
)
from nonlocal_cauchy.analysis.scaling import (
    ScalingTriple,
    power_law_triple,
    tabulated_triple,
)
from nonlocal_cauchy.common.config_parser import (
    AtomConfig,
    ConfigParseError,
    ExperimentConfig,
    MeasureConfig,
    ModeConfig,
    PhiConfig,
)
from nonlocal_cauchy.common.grid import Field, GridSpec

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class Experiment:
    """Domain objects described by one configuration."""

    config: ExperimentConfig
    pi: LevyMeasure
    mu: LevyMeasure
    mu0: Optional[LevyMeasure]
    kappa: ScalingTriple
    params: AssumptionParams
    grid: GridSpec
    model: Optional[BernsteinModel] = None

    @property
    def seed(self) -> int:
        return self.config.run.seed

    @property
    def threads(self) -> int:
        return self.config.run.threads


def default_exponents(sigma: float) -> tuple[float, float]:
    """
    Moment exponents (alpha1, alpha2) inside the admissible range for sigma.

    alpha1 sits above sigma and alpha2 below it, each inside the regime
    interval: (1, sigma/2) below order 1, (3/2, 1/2) at order 1 and
    ((sigma + 2)/2, (sigma + 1)/2) above it.
    """
    if sigma < 1:
        return 1.0, sigma / 2.0
    if sigma == 1:
        return 1.5, 0.5
    return min(2.0, (sigma + 2.0) / 2.0), (sigma + 1.0) / 2.0


def _atoms(
    atoms: Optional[list[AtomConfig]], d: int
) -> Optional[tuple[FloatArray, FloatArray]]:
    if atoms is None:
        return None
    directions = np.array([atom.direction for atom in atoms], dtype=float)
    if directions.shape[1] != d:
        raise ConfigParseError(f"atom directions must have {d} entries")
    weights = np.array([atom.weight for atom in atoms], dtype=float)
    return directions, weights


def build_phi(spec: PhiConfig) -> BernsteinFunction:
    """Bernstein function from its catalog entry or a table of Levy atoms."""
    if spec.lambda_atoms is not None:
        times, masses = zip(*spec.lambda_atoms)
        return from_levy_atoms(list(times), list(masses))
    assert spec.catalog is not None
    return catalog_function(
        spec.catalog, alphas=spec.alphas or None, alpha=spec.alpha, beta=spec.beta
    )


def build_measure(
    spec: MeasureConfig, d: int
) -> tuple[LevyMeasure, Optional[BernsteinModel]]:
    """
    Args:
        spec: Measure section of the configuration
        d: Dimension of the grid

    Returns:
        Tuple (measure, Bernstein model or None)

    Raises:
        ConfigParseError: For atoms whose directions do not match d
    """
    atoms = _atoms(spec.atoms, d)
    model = None
    if spec.kind == "stable":
        assert spec.sigma is not None
        cap = math.inf if spec.cap is None else spec.cap
        measure = stable_measure(
            spec.sigma, d, spec.coefficient, atoms, floor=spec.floor, cap=cap
        )
    elif spec.kind == "radial_angular":
        assert spec.sigma is not None and spec.radial_table is not None
        r, rho = zip(*spec.radial_table)
        profile = RadialProfile.from_table(list(r), [spec.coefficient * v for v in rho])
        if spec.floor > 0 or spec.cap is not None:
            cap = math.inf if spec.cap is None else spec.cap
            profile = profile.restricted(spec.floor, cap)
        measure = radial_angular_measure(spec.sigma, d, profile, atoms)
    elif spec.kind == "bernstein":
        assert spec.phi is not None
        factor = None if spec.rho0 is None else constant_factor(spec.rho0)
        model = bernstein_measure(build_phi(spec.phi), d, atoms, a_factor=factor)
        measure = model.measure
    else:
        assert spec.minuend is not None and spec.subtrahend is not None
        minuend, _ = build_measure(spec.minuend, d)
        subtrahend, _ = build_measure(spec.subtrahend, d)
        measure = difference(minuend, subtrahend)
    if spec.weight != 1.0:
        measure = reweight(measure, spec.weight)
    logger.debug("built measure %s", measure.key)
    return measure, model


def build_scaling(
    config: ExperimentConfig, pi: LevyMeasure, model: Optional[BernsteinModel]
) -> ScalingTriple:
    """
    Scaling triple of the configuration.

    A power law without theta takes the order of pi, or the canonical
    triple when pi is a Bernstein measure.
    """
    spec = config.scaling
    if spec.kind == "table":
        assert spec.table is not None
        r, k = zip(*spec.table)
        return tabulated_triple(list(r), list(k))
    if spec.kind == "bernstein" or (spec.theta is None and model is not None):
        if model is None:
            raise ConfigParseError("scaling.kind: 'bernstein' needs a bernstein pi")
        return model.triple
    return power_law_triple(pi.sigma if spec.theta is None else spec.theta)


def build_params(config: ExperimentConfig, sigma: float) -> AssumptionParams:
    alpha1, alpha2 = default_exponents(sigma)
    section = config.assumptions
    return AssumptionParams(
        alpha1=alpha1 if section.alpha1 is None else section.alpha1,
        alpha2=alpha2 if section.alpha2 is None else section.alpha2,
        n0=section.n0,
        N0=section.N0,
        c1=section.c1,
    )


def build_experiment(config: ExperimentConfig) -> Experiment:
    """
    Build every domain object the tasks share.

    Args:
        config: Validated configuration

    Returns:
        Experiment with mu = pi when no mu is configured
    """
    d = config.grid.d
    grid = GridSpec(d, config.grid.n, config.grid.L)
    pi, model = build_measure(config.pi, d)
    mu = pi if config.mu is None else build_measure(config.mu, d)[0]
    mu0 = None if config.mu0 is None else build_measure(config.mu0, d)[0]
    kappa = build_scaling(config, pi, model)
    logger.info("experiment: pi=%s, kappa=%s, grid=%s", pi.key, kappa.label, grid)
    return Experiment(
        config=config,
        pi=pi,
        mu=mu,
        mu0=mu0,
        kappa=kappa,
        params=build_params(config, pi.sigma),
        grid=grid,
        model=model,
    )


def mode_field(grid: GridSpec, modes: list[ModeConfig]) -> Field:
    """Sum of real Fourier modes at t = 0."""
    total = Field.zeros(grid)
    for mode in modes:
        total = total.plus(
            Field.mode(grid, tuple(mode.index), mode.amplitude, mode.phase, real=True)
        )
    return total


def source_series(
    grid: GridSpec, modes: list[ModeConfig], T: float, n_steps: int
) -> Optional[TimeSeriesField]:
    """Decaying modes sampled on the solver times, or None without modes."""
    if not modes:
        return None
    times = np.linspace(0.0, T, n_steps + 1)
    fields = [
        Field.mode(grid, tuple(mode.index), mode.amplitude, mode.phase, real=True)
        for mode in modes
    ]
    slices = []
    for t in times:
        total = Field.zeros(grid)
        for mode, wave in zip(modes, fields):
            total = total.plus(wave, math.exp(-mode.decay * t))
        slices.append(total)
    return TimeSeriesField(times, tuple(slices))


def build_problem(experiment: Experiment) -> CauchyProblem:
    """The Cauchy problem of the ``problem`` section."""
    spec = experiment.config.problem
    grid = experiment.grid
    return CauchyProblem(
        experiment.pi,
        experiment.mu,
        experiment.kappa,
        spec.lam,
        spec.T,
        mode_field(grid, spec.initial),
        source_series(grid, spec.source, spec.T, spec.n_steps),
        spec.s,
        spec.p,
    )
