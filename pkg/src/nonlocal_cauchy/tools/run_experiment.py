"""CLI tool to run spectral, Monte Carlo and acceptance experiments from a config."""

import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import click
from scipy import fft

from nonlocal_cauchy.analysis.symbol_calculus import save_multiplier
from nonlocal_cauchy.common.config_parser import (
    ACCEPTANCE_CRITERIA,
    ConfigParseError,
    ExperimentConfig,
    config_hash,
    load_config,
    parse_config,
    with_overrides,
)
from nonlocal_cauchy.common.errors import (
    ConfigError,
    NumericalGuardError,
    ParameterError,
)
from nonlocal_cauchy.common.reports import artifact_payload, write_csv, write_json
from nonlocal_cauchy.common.utils import format_duration, format_timestamp
from nonlocal_cauchy.tools.acceptance import CRITERIA, SuiteOptions, run_criteria
from nonlocal_cauchy.tools.builders import Experiment, build_experiment
from nonlocal_cauchy.tools.tasks import PIPELINES, TaskResult

logger = logging.getLogger(__name__)

THREADS_ENVVAR = "NONLOCAL_CAUCHY_THREADS"
ACCEPT_DEFAULT: dict[str, Any] = {"pi": {"kind": "stable", "sigma": 1.0}}


@dataclass
class Invocation:
    """Options shared by every subcommand."""

    config_path: Optional[Path]
    seed: Optional[int]
    threads: Optional[int]
    out_dir: Optional[Path]
    verbose: bool
    quiet: bool


def _accept(config: ExperimentConfig, criteria: Sequence[int]) -> list[TaskResult]:
    """One result per acceptance criterion, each timed separately."""
    options = SuiteOptions(
        seed=config.run.seed,
        threads=config.run.threads,
        paths=config.run.paths,
        corpus_size=config.run.corpus_size,
    )
    results = []
    for number in sorted(set(criteria)):
        begin = time.perf_counter()
        reports = run_criteria([number], options)[number]
        results.append(
            TaskResult(
                f"accept_{number}",
                reports,
                data={"criterion": number, "title": CRITERIA[number][0]},
                seconds=time.perf_counter() - begin,
            )
        )
    return results


def write_artifacts(out_dir: Path, digest: str, result: TaskResult) -> list[Path]:
    """
    Write the JSON report, CSV tables and binary spectra of one task.

    Args:
        out_dir: Output directory, created when missing
        digest: Configuration hash embedded in the JSON report
        result: Finished task

    Returns:
        Paths written, the JSON report first
    """
    payload = artifact_payload(result.name, digest, result.reports, result.data)
    paths = [write_json(out_dir / f"{result.name}.json", payload)]
    for filename, (header, rows) in result.tables.items():
        paths.append(write_csv(out_dir / filename, header, rows))
    for stem, multiplier in result.dumps.items():
        paths.append(save_multiplier(multiplier, out_dir / stem))
    return paths


def _write_metadata(
    out_dir: Path,
    config: ExperimentConfig,
    digest: str,
    started: float,
    results: Sequence[TaskResult],
) -> Path:
    return write_json(
        out_dir / "metadata.json",
        {
            "timestamp": format_timestamp(started),
            "config_hash": digest,
            "seed": config.run.seed,
            "threads": config.run.threads,
            "tasks": [
                {
                    "name": r.name,
                    "pass": r.passed,
                    "duration": format_duration(r.seconds),
                    "seconds": r.seconds,
                }
                for r in results
            ],
        },
    )


def run(
    config: ExperimentConfig,
    tasks: Optional[Sequence[str]] = None,
    criteria: Optional[Sequence[int]] = None,
) -> tuple[int, list[TaskResult]]:
    """
    Run tasks in order and write their artifacts.

    Args:
        config: Validated configuration
        tasks: Task names; the configured ``run.tasks`` when None
        criteria: Acceptance criteria for ``accept``; ``run.criteria`` when None

    Returns:
        Tuple of (exit status, results) where the status is 1 if any check failed

    Raises:
        ConfigError: If the configuration cannot be turned into an experiment
        ParameterError: For an unknown task or a value outside an operation's domain
        NumericalGuardError: If a numerical guard trips
    """
    selected = list(config.run.tasks if tasks is None else tasks)
    if not selected:
        logger.info("no tasks selected, nothing to do")
        return 0, []
    unknown = [name for name in selected if name != "accept" and name not in PIPELINES]
    if unknown:
        raise ParameterError(f"unknown tasks {unknown}")

    out_dir = Path(config.output.out_dir)
    digest = config_hash(config)
    started = time.time()
    experiment: Optional[Experiment] = None
    results: list[TaskResult] = []

    with fft.set_workers(config.run.threads):
        for name in selected:
            if name == "accept":
                finished = _accept(config, criteria or config.run.criteria)
            else:
                if experiment is None:
                    experiment = build_experiment(config)
                begin = time.perf_counter()
                result = PIPELINES[name](experiment)
                result.seconds = time.perf_counter() - begin
                finished = [result]
            for result in finished:
                write_artifacts(out_dir, digest, result)
                logger.info(
                    "%s: %s in %s",
                    result.name,
                    "PASS" if result.passed else "FAIL",
                    format_duration(result.seconds),
                )
            results.extend(finished)

    _write_metadata(out_dir, config, digest, started, results)
    return (0 if all(r.passed for r in results) else 1), results


def format_task(result: TaskResult, verbose: bool) -> str:
    """
    Format one task as a status line followed by its reports.

    Args:
        result: Finished task
        verbose: Show passing reports as well as failing ones

    Returns:
        Formatted string for output
    """
    status = "PASS" if result.passed else "FAIL"
    lines = [f"{result.name}: {status} ({format_duration(result.seconds)})"]
    for report in result.reports:
        if not verbose and report.passed:
            continue
        verdict = "pass" if report.passed else "FAIL"
        line = f"  {verdict} {report.name}: value={report.value:.6g}"
        line += f", bound={report.bound:.6g}"
        if report.diagnostic:
            line += f" ({report.diagnostic})"
        lines.append(line)
    return "\n".join(lines)


def format_summary(results: Sequence[TaskResult], out_dir: str) -> str:
    passed = sum(1 for r in results if r.passed)
    lines = [
        "---",
        "Summary:",
        f"  Tasks run: {len(results)}",
        f"  Passed: {passed}",
        f"  Failed: {len(results) - passed}",
        f"  Artifacts: {out_dir}",
    ]
    return "\n".join(lines)


def _resolve_config(
    invocation: Invocation,
    tasks: Optional[Sequence[str]],
    run_updates: Optional[dict[str, Any]] = None,
) -> ExperimentConfig:
    if invocation.config_path is not None:
        config = load_config(invocation.config_path)
    elif tasks and all(name == "accept" for name in tasks):
        config = parse_config(ACCEPT_DEFAULT)
    else:
        raise ConfigParseError("--config is required for this command")
    out_dir = None if invocation.out_dir is None else str(invocation.out_dir)
    return with_overrides(
        config, invocation.seed, invocation.threads, out_dir, run_updates
    )


def _execute(
    invocation: Invocation,
    tasks: Optional[Sequence[str]],
    criteria: Optional[Sequence[int]] = None,
    run_updates: Optional[dict[str, Any]] = None,
) -> None:
    """Run, print the summary and exit with the status code."""
    try:
        config = _resolve_config(invocation, tasks, run_updates)
        status, results = run(config, tasks, criteria)
    except ConfigError as e:
        click.echo(f"Error in configuration:\n{e}", err=True)
        sys.exit(2)
    except ParameterError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(2)
    except NumericalGuardError as e:
        click.echo(f"Numerical guard tripped: {e}", err=True)
        sys.exit(3)

    if invocation.quiet:
        passed = sum(1 for r in results if r.passed)
        click.echo(f"Passed: {passed}, Failed: {len(results) - passed}")
    elif results:
        for result in results:
            click.echo(format_task(result, invocation.verbose))
        click.echo(format_summary(results, config.output.out_dir))
    else:
        click.echo("No tasks selected")

    sys.exit(status)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Experiment configuration (TOML or JSON)",
)
@click.option(
    "--seed",
    type=click.IntRange(min=0),
    default=None,
    help="Override run.seed",
)
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=None,
    envvar=THREADS_ENVVAR,
    show_envvar=True,
    help="Override run.threads",
)
@click.option(
    "--out-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Override output.out_dir",
)
@click.option(
    "-v",
    "--verbose",
    is_flag=True,
    help="Show every report and debug logging",
)
@click.option(
    "-q",
    "--quiet",
    is_flag=True,
    help="Only show pass/fail counts",
)
@click.pass_context
def main(
    ctx: click.Context,
    config_path: Optional[Path],
    seed: Optional[int],
    threads: Optional[int],
    out_dir: Optional[Path],
    verbose: bool,
    quiet: bool,
) -> None:
    """
    Run experiments on nonlocal parabolic Cauchy problems.

    Every subcommand writes <task>.json reports, CSV tables and a
    metadata.json into the output directory. Exit status is 0 when all
    checks pass, 1 when one fails, 2 for configuration errors and 3 when a
    numerical guard trips.

    Examples:

        nonlocal-cauchy --config configs/stable_cauchy.toml run

        nonlocal-cauchy --config configs/stable_cauchy.toml --seed 7 mc --paths 20000

        nonlocal-cauchy accept --criterion 1 --criterion 2
    """
    level = logging.WARNING
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.ERROR
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    ctx.obj = Invocation(config_path, seed, threads, out_dir, verbose, quiet)


@main.command("run")
@click.pass_obj
def run_command(invocation: Invocation) -> None:
    """Run the tasks listed in run.tasks."""
    _execute(invocation, None)


def _task_command(name: str, help_text: str) -> click.Command:
    @click.pass_obj
    def callback(invocation: Invocation) -> None:
        _execute(invocation, [name])

    return click.Command(name, callback=callback, help=help_text)


for _name, _help in (
    ("symbol", "Symbols of pi and mu, comparability and order."),
    ("density", "Transition densities of mu at run.t_values."),
    ("norms", "Function-space norms and their equivalence audits."),
    ("solve", "Solve the configured Cauchy problem and check its estimates."),
    ("audit", "Kernel, continuity, Hormander and embedding audits."),
    ("verify-assumptions", "Assumptions B, D, A0, G, H and scaling audits."),
):
    main.add_command(_task_command(_name, _help))


def _parse_probes(
    _ctx: click.Context, _param: click.Parameter, values: tuple[str, ...]
) -> list[list[float]]:
    try:
        return [[float(x) for x in value.split(",")] for value in values]
    except ValueError as e:
        raise click.BadParameter(f"probes are comma-separated numbers: {e}") from e


@main.command("mc")
@click.option(
    "--paths",
    type=click.IntRange(min=1),
    default=None,
    help="Override run.paths",
)
@click.option(
    "--t",
    "t_values",
    type=click.FloatRange(min=0, min_open=True),
    multiple=True,
    help="Time horizon, repeatable (overrides run.t_values)",
)
@click.option(
    "--probes",
    "probes",
    multiple=True,
    callback=_parse_probes,
    help="Probe point as comma-separated coordinates, repeatable",
)
@click.pass_obj
def mc_command(
    invocation: Invocation,
    paths: Optional[int],
    t_values: tuple[float, ...],
    probes: list[list[float]],
) -> None:
    """Path sampling, moment envelopes and Feynman-Kac probes."""
    updates: dict[str, Any] = {}
    if paths is not None:
        updates["paths"] = paths
    if t_values:
        updates["t_values"] = list(t_values)
    if probes:
        updates["probes"] = probes
    _execute(invocation, ["mc"], run_updates=updates)


@main.command("accept")
@click.option(
    "--criterion",
    "criteria",
    type=click.IntRange(min(ACCEPTANCE_CRITERIA), max(ACCEPTANCE_CRITERIA)),
    multiple=True,
    help="Acceptance criterion to run, repeatable (default: run.criteria)",
)
@click.pass_obj
def accept_command(invocation: Invocation, criteria: tuple[int, ...]) -> None:
    """Acceptance criteria 1 to 11, one JSON report per criterion."""
    _execute(invocation, ["accept"], criteria=list(criteria) or None)


if __name__ == "__main__":
    main()  # pylint: disable=no-value-for-parameter
