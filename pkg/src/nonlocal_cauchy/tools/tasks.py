"""Task pipelines behind the command-line subcommands.

Each pipeline takes a built Experiment and returns a TaskResult: check
reports, JSON-ready data, CSV tables and binary spectra. Writing them to
disk is left to the runner.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from nonlocal_cauchy.analysis.assumptions import (
    AngularFunction,
    check_assumption_A0,
    check_assumption_B,
    check_assumption_D,
    check_assumption_G,
    fit_mu0,
)
from nonlocal_cauchy.analysis.bernstein import check_assumption_H
from nonlocal_cauchy.analysis.cauchy_solver import (
    apriori_report,
    estimate_checks,
    hypotheses_report,
    plancherel_bound,
    residual_check,
    solve,
)
from nonlocal_cauchy.analysis.density_kernels import (
    HormanderSample,
    continuity_audit,
    density,
    density_scaling_check,
    embedding_kernel_audit,
    holder_modulus_audit,
    hormander_audit,
    integrability_check,
    kernel_bound_audit,
    wrapped_cauchy_density,
)
from nonlocal_cauchy.analysis.levy_measure import (
    LevyMeasure,
    estimate_order,
    stable_measure,
)
from nonlocal_cauchy.analysis.mc_oracle import (
    CUT_LADDER,
    HISTOGRAM_BINS,
    bias_audit,
    build_sampler,
    feynman_kac,
    histogram_consistency,
    moment_audit,
)
from nonlocal_cauchy.analysis.scaling import audit_scaling
from nonlocal_cauchy.analysis.smoothness_spaces import (
    NormContext,
    NormFunction,
    band_limited_corpus,
    besov_norm,
    difference_norm,
    embedding_audit,
    equivalence_audit,
    kappa_weight_series,
    triebel_norm,
)
from nonlocal_cauchy.analysis.symbol_calculus import (
    SpectralMultiplier,
    check_comparability,
    continuity_ratio_audit,
    symbol,
)
from nonlocal_cauchy.common.grid import Field
from nonlocal_cauchy.common.reports import CheckReport
from nonlocal_cauchy.tools.builders import Experiment, build_problem

logger = logging.getLogger(__name__)

EMBEDDING_GAP = 0.1
WEIGHT_EXPONENT = 0.5
HORMANDER_SAMPLES = 5

Table = tuple[list[str], list[list[Any]]]


@dataclass
class TaskResult:
    """Reports, data, tables and spectra produced by one task."""

    name: str
    reports: list[CheckReport] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, Table] = field(default_factory=dict)
    dumps: dict[str, SpectralMultiplier] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


Pipeline = Callable[[Experiment], TaskResult]


def _bounded(
    name: str, value: float, bound: float, diagnostic: str, worst_point: Any = None
) -> CheckReport:
    passed = value <= bound
    return CheckReport(
        name=name,
        value=value,
        bound=bound,
        passed=passed,
        worst_point=worst_point,
        diagnostic="" if passed else diagnostic,
    )


def _coordinate_header(d: int, prefix: str) -> list[str]:
    return [f"{prefix}{k}" for k in range(d)]


def _grid_rows(fields: list[Field]) -> list[list[Any]]:
    """Coordinates followed by the real values of every field, one row per point."""
    grid = fields[0].grid
    coords = [c.ravel() for c in grid.coordinates]
    values = [np.real(f.to_physical().values).ravel() for f in fields]
    return [list(row) for row in zip(*coords, *values)]


def _is_reference_cauchy(mu: LevyMeasure) -> bool:
    return mu.key == stable_measure(1.0, 1).key


def run_symbol(experiment: Experiment) -> TaskResult:
    """Symbols of pi and mu on the lattice, comparability and the order of pi."""
    grid = experiment.grid
    psi_pi = symbol(experiment.pi, grid)
    psi_mu = symbol(experiment.mu, grid)
    c1, c2 = check_comparability(experiment.pi, experiment.mu, grid)
    comparable = c1 > 0 and math.isfinite(c2)
    order = estimate_order(experiment.pi)
    header = _coordinate_header(grid.d, "xi") + [
        "psi_pi_re",
        "psi_pi_im",
        "psi_mu_re",
        "psi_mu_im",
    ]
    rows = [
        [*xi, a.real, a.imag, b.real, b.imag]
        for xi, a, b in zip(
            grid.frequency_points(), psi_pi.values.ravel(), psi_mu.values.ravel()
        )
    ]
    reports = [
        CheckReport(
            name="comparability",
            value=c1,
            bound=0.0,
            passed=comparable,
            details={"c1": c1, "c2": c2},
            diagnostic="" if comparable else "symbols are not comparable",
        ),
        CheckReport(
            name="order",
            value=order.value,
            bound=experiment.pi.sigma,
            passed=not order.wide_confidence,
            details={"residual": order.residual},
            diagnostic="not power-like near 0" if order.wide_confidence else "",
        ),
    ]
    return TaskResult(
        "symbol",
        reports,
        tables={"symbol.csv": (header, rows)},
        dumps={"symbol_pi": psi_pi, "symbol_mu": psi_mu},
    )


def run_density(experiment: Experiment) -> TaskResult:
    """Transition densities of mu at the configured times."""
    grid, mu = experiment.grid, experiment.mu
    run = experiment.config.run
    times = run.t_values
    fields = [density(mu, t, grid) for t in times]
    defects = [abs(p.integral().real - 1.0) for p in fields]
    worst = int(np.argmax(defects))
    reports = [
        _bounded(
            "density_mass",
            defects[worst],
            run.mass_tolerance,
            "mass is lost",
            worst_point=times[worst],
        ),
        density_scaling_check(mu, experiment.kappa, times, grid),
    ]
    if _is_reference_cauchy(mu):
        errors = []
        for p, t in zip(fields, times):
            oracle = wrapped_cauchy_density(grid.axis(), math.pi * t, grid.L)
            gap = np.max(np.abs(p.values.real - oracle)) / np.max(oracle)
            errors.append(float(gap))
        worst = int(np.argmax(errors))
        reports.append(
            _bounded(
                "density_oracle",
                errors[worst],
                run.oracle_tolerance,
                "density misses the Cauchy closed form",
                worst_point=times[worst],
            )
        )
    header = _coordinate_header(grid.d, "x") + [f"p(t={t:g})" for t in times]
    return TaskResult(
        "density", reports, tables={"density.csv": (header, _grid_rows(fields))}
    )


def _norm_context(experiment: Experiment) -> NormContext:
    return NormContext.build(
        experiment.grid,
        experiment.mu,
        experiment.kappa,
        N=experiment.config.problem.N,
        alpha1=experiment.params.alpha1,
    )


def run_norms(experiment: Experiment) -> TaskResult:
    """Norms of a band-limited corpus and the equivalence audits between them."""
    spec = experiment.config.problem
    s, p, q = spec.s, spec.p, spec.q
    ctx = _norm_context(experiment)
    corpus = band_limited_corpus(
        experiment.grid, experiment.config.run.corpus_size, experiment.seed
    )
    m = spec.m if spec.m is not None else math.floor(s * ctx.alpha1) + 1

    def besov(variant: str) -> NormFunction:
        return lambda f, c: besov_norm(f, s, p, q, variant, c).value

    def triebel(variant: str) -> NormFunction:
        return lambda f, c: triebel_norm(f, s, p, variant, c).value

    def differences(f: Field, c: NormContext) -> float:
        return difference_norm(f, s, p, q, m, c).value

    columns: dict[str, NormFunction] = {
        "besov_kappa": besov("kappa_weighted"),
        "besov_bessel": besov("bessel_weighted"),
        "triebel_kappa": triebel("kappa_weighted"),
        "triebel_bessel": triebel("bessel_weighted"),
    }
    if 0 < s <= 1:
        columns["triebel_fractional"] = triebel("fractional")
    if s > 0:
        columns["difference"] = differences
    rows = [
        [index] + [norm(f, ctx) for norm in columns.values()]
        for index, f in enumerate(corpus)
    ]
    reports = [
        equivalence_audit(
            columns["triebel_kappa"], columns["triebel_bessel"], corpus, ctx, "pro1"
        ),
        equivalence_audit(
            columns["besov_kappa"], columns["besov_bessel"], corpus, ctx, "pro2"
        ),
    ]
    if s > 0:
        reports.append(
            equivalence_audit(
                columns["difference"], columns["besov_kappa"], corpus, ctx, "pk2"
            )
        )
    reports.append(embedding_audit(corpus, ctx, s, EMBEDDING_GAP, p, q))
    reports.append(kappa_weight_series(experiment.kappa, ctx.N, WEIGHT_EXPONENT))
    return TaskResult(
        "norms",
        reports,
        data={"s": s, "p": p, "q": q, "N": ctx.N, "m": m},
        tables={"norms.csv": (["function", *columns], rows)},
    )


def run_solve(experiment: Experiment) -> TaskResult:
    """Solve the configured problem and check it against the estimates."""
    problem = build_problem(experiment)
    spec = experiment.config.problem
    solution = solve(problem, spec.n_steps)
    final = solution.u.slices[-1]
    reports = [
        residual_check(problem, solution),
        *estimate_checks(problem, solution),
        plancherel_bound(problem, solution),
        apriori_report(problem, solution, _norm_context(experiment)),
        hypotheses_report(experiment.kappa, experiment.params.alpha2, spec.p),
    ]
    header = _coordinate_header(experiment.grid.d, "x") + ["g", f"u(T={spec.T:g})"]
    norms = solution.u.lp_norms(spec.p)
    spectrum = final.to_frequency()
    return TaskResult(
        "solve",
        reports,
        data={"rho_lambda": solution.rho_lambda, **solution.diagnostics},
        tables={
            "solution.csv": (header, _grid_rows([problem.g, final])),
            "solution_norms.csv": (
                ["t", f"L{spec.p:g}_norm"],
                [[t, n] for t, n in zip(solution.u.times, norms)],
            ),
        },
        dumps={
            "solution_u": SpectralMultiplier(
                spectrum.grid,
                np.asarray(spectrum.values, dtype=complex),
                f"u(T={spec.T:g})",
            )
        },
    )


def _fk_crosscheck(experiment: Experiment, table: dict[str, Table]) -> CheckReport:
    """Feynman-Kac estimates at the probes against the solver's final slice."""
    run = experiment.config.run
    grid = experiment.grid
    sampler = build_sampler(experiment.pi, experiment.seed, run.jump_cut)
    problem = build_problem(experiment)
    final = solve(problem, experiment.config.problem.n_steps).u.slices[-1]
    probes = np.asarray(run.probes, dtype=float).reshape(len(run.probes), grid.d)
    estimates = feynman_kac(
        sampler,
        problem.lam,
        problem.f,
        problem.g,
        problem.T,
        probes,
        run.paths,
        run.threads,
    )
    values = np.real(final.interpolate(probes))
    ratios = [
        abs(v - e.estimate) / (run.standard_errors * e.stderr + e.bias_bound)
        for v, e in zip(values, estimates)
    ]
    header = _coordinate_header(grid.d, "x") + [
        "estimate",
        "stderr",
        "bias_bound",
        "solver",
    ]
    table["feynman_kac.csv"] = (
        header,
        [
            [*e.probe, e.estimate, e.stderr, e.bias_bound, v]
            for e, v in zip(estimates, values)
        ],
    )
    worst = int(np.argmax(ratios))
    return _bounded(
        "fk_crosscheck",
        float(ratios[worst]),
        1.0,
        "solver value outside the Monte Carlo band",
        worst_point=probes[worst].tolist(),
    )


def run_mc(experiment: Experiment) -> TaskResult:
    """Path sampling: histograms, moments, the bias ladder and Feynman-Kac probes."""
    run = experiment.config.run
    grid = experiment.grid
    sampler = build_sampler(experiment.pi, experiment.seed, run.jump_cut)
    ladder = [float(e) for e in CUT_LADDER if e > sampler.jump_cut]
    ladder.append(sampler.jump_cut)
    reports = [bias_audit(experiment.pi, ladder)]
    if grid.n % HISTOGRAM_BINS[grid.d] == 0:
        reports.extend(
            histogram_consistency(sampler, grid, t, run.paths, run.threads)
            for t in run.t_values
        )
    else:
        logger.warning("n=%d does not split into histogram bins, skipped", grid.n)
    if len(run.t_values) >= 2:
        alpha2 = experiment.params.alpha2
        reports.append(
            moment_audit(sampler, alpha2, run.t_values, run.paths, run.threads)
        )
    tables: dict[str, Table] = {}
    if run.probes:
        reports.append(_fk_crosscheck(experiment, tables))
    return TaskResult(
        "mc",
        reports,
        data={
            "jump_cut": sampler.jump_cut,
            "rate": sampler.total_rate,
            "bias_bound": sampler.bias_bound,
        },
        tables=tables,
    )


def run_audit(experiment: Experiment) -> TaskResult:
    """Kernel, continuity, Hormander and embedding audits for pi and mu."""
    pi, mu, kappa = experiment.pi, experiment.mu, experiment.kappa
    grid = experiment.grid
    spec = experiment.config.problem
    run = experiment.config.run
    t = run.t_values[0]
    corpus = band_limited_corpus(grid, run.corpus_size, experiment.seed)
    shift = (0.0,) * (grid.d - 1)
    samples = [
        HormanderSample(0.5 * kappa.kappa_at(delta), (0.5 * delta, *shift), delta)
        for delta in np.geomspace(4.0 * grid.h, 1.0, HORMANDER_SAMPLES).tolist()
    ]
    z_norms = np.geomspace(0.1, 1.0, 4).tolist()
    reports = [
        kernel_bound_audit(
            pi,
            mu,
            kappa,
            (0,) * grid.d,
            [0.25 * t, 0.5 * t, t, 2.0 * t],
            [1.0, 2.0, 4.0, 8.0],
            grid,
            experiment.params.alpha2,
        ),
        continuity_audit(pi, mu, kappa, t, grid),
        hormander_audit(
            pi, mu, kappa, spec.lam, samples, grid, experiment.config.assumptions.C0
        ),
        integrability_check(kappa, 0.5, grid.d, spec.q),
        embedding_kernel_audit(pi, kappa, 0.5, spec.q, z_norms, grid),
        continuity_ratio_audit(pi, mu, corpus, spec.p),
        *holder_modulus_audit(pi, kappa, corpus[0], z_norms, spec.p),
    ]
    return TaskResult("audit", reports)


def _angular_factor(rho0: Optional[float]) -> Optional[AngularFunction]:
    if rho0 is None:
        return None
    return lambda w: np.full(np.shape(w)[0], rho0)


def run_verify(experiment: Experiment) -> TaskResult:
    """Assumptions B, D, A0, G and H with the scaling-function audits."""
    pi, kappa, params = experiment.pi, experiment.kappa, experiment.params
    model = experiment.model
    params.check_regime(pi.sigma)
    reports = [check_assumption_B(pi, kappa, params)]
    data: dict[str, Any] = {"alpha1": params.alpha1, "alpha2": params.alpha2}
    rho0 = _angular_factor(experiment.config.pi.rho0)
    if experiment.mu0 is None:
        delta1 = model.fit.delta1 if model is not None else pi.sigma / 2.0
        mu0, c1 = fit_mu0(pi, kappa, delta1, rho0)
        data["c1"] = c1
    else:
        mu0 = experiment.mu0
    reports.append(check_assumption_D(pi, mu0, kappa))
    reports.append(check_assumption_A0(mu0, params))
    reports.append(check_assumption_G(pi, rho0))
    reports.extend(audit_scaling(kappa, sigma_hat=pi.sigma))
    if model is not None:
        reports.extend(check_assumption_H(model.phi, pi.d))
        data.update(
            delta1=model.fit.delta1, delta2=model.fit.delta2, N=model.fit.constant
        )
    return TaskResult("verify-assumptions", reports, data=data)


PIPELINES: dict[str, Pipeline] = {
    "symbol": run_symbol,
    "density": run_density,
    "norms": run_norms,
    "solve": run_solve,
    "mc": run_mc,
    "audit": run_audit,
    "verify-assumptions": run_verify,
}
