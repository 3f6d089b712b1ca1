"""Experiment configuration: schema, loading and hashing.

Configurations are TOML (preferred) or JSON documents validated by pydantic
models that reject unknown keys.
"""

import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Literal, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from nonlocal_cauchy.common.errors import ConfigError

TaskName = Literal[
    "symbol", "density", "norms", "solve", "mc", "audit", "verify-assumptions", "accept"
]
ACCEPTANCE_CRITERIA = tuple(range(1, 12))


class ConfigParseError(ConfigError):
    """Raised when a configuration file cannot be read or fails validation."""


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)


class AtomConfig(_Section):
    """One angular atom: unit direction and nonnegative weight."""

    direction: list[float]
    weight: float = Field(default=1.0, ge=0)


class PhiConfig(_Section):
    """Bernstein function: a catalog item or a table of Levy-measure atoms."""

    catalog: Optional[Literal[0, 1, 2, 3]] = None
    alphas: list[float] = Field(default_factory=list)
    alpha: Optional[float] = Field(default=None, gt=0, lt=1)
    beta: Optional[float] = Field(default=None, gt=0, lt=1)
    lambda_atoms: Optional[list[tuple[float, float]]] = None

    @model_validator(mode="after")
    def _one_source(self) -> "PhiConfig":
        if (self.catalog is None) == (self.lambda_atoms is None):
            raise ValueError("give exactly one of 'catalog' or 'lambda_atoms'")
        if self.catalog == 0 and not self.alphas:
            raise ValueError("catalog item 0 needs 'alphas'")
        if self.catalog == 0 and any(not 0 < a < 1 for a in self.alphas):
            raise ValueError("catalog item 0 needs every alpha in (0, 1)")
        if self.catalog in (1, 2) and (self.alpha is None or self.beta is None):
            raise ValueError(f"catalog item {self.catalog} needs 'alpha' and 'beta'")
        if self.catalog == 3 and self.alpha is None:
            raise ValueError("catalog item 3 needs 'alpha'")
        return self


class MeasureConfig(_Section):
    """Declaration of a Levy measure."""

    kind: Literal["stable", "bernstein", "radial_angular", "difference"] = "stable"
    sigma: Optional[float] = Field(default=None, gt=0, lt=2)
    coefficient: float = Field(default=1.0, gt=0)
    weight: float = Field(default=1.0, ge=0)
    atoms: Optional[list[AtomConfig]] = None
    floor: float = Field(default=0.0, ge=0)
    cap: Optional[float] = Field(default=None, gt=0)
    phi: Optional[PhiConfig] = None
    rho0: Optional[float] = Field(default=None, gt=0, le=1)
    radial_table: Optional[list[tuple[float, float]]] = None
    minuend: Optional["MeasureConfig"] = None
    subtrahend: Optional["MeasureConfig"] = None

    @model_validator(mode="after")
    def _kind_fields(self) -> "MeasureConfig":
        if self.kind == "stable" and self.sigma is None:
            raise ValueError("stable measures need 'sigma'")
        if self.kind == "bernstein" and self.phi is None:
            raise ValueError("bernstein measures need 'phi'")
        if self.kind == "radial_angular" and (
            self.sigma is None or not self.radial_table
        ):
            raise ValueError("radial_angular measures need 'sigma' and 'radial_table'")
        if self.kind == "difference" and (
            self.minuend is None or self.subtrahend is None
        ):
            raise ValueError("difference measures need 'minuend' and 'subtrahend'")
        if self.cap is not None and self.cap <= self.floor:
            raise ValueError("'cap' must exceed 'floor'")
        return self


MeasureConfig.model_rebuild()


class ScalingConfig(_Section):
    """Scaling function: power law, the Bernstein canonical triple, or a table."""

    kind: Literal["power", "bernstein", "table"] = "power"
    theta: Optional[float] = Field(default=None, gt=0)
    table: Optional[list[tuple[float, float]]] = None

    @model_validator(mode="after")
    def _table_present(self) -> "ScalingConfig":
        if self.kind == "table" and not self.table:
            raise ValueError("table scaling needs 'table'")
        return self


class AssumptionConfig(_Section):
    """Exponents and constants of the moment and nondegeneracy assumptions."""

    alpha1: Optional[float] = Field(default=None, gt=0, le=2)
    alpha2: Optional[float] = Field(default=None, ge=0, le=2)
    n0: float = Field(default=1e6, gt=0)
    N0: float = Field(default=1e6, gt=0)
    c1: float = Field(default=1e-6, gt=0)
    C0: Optional[float] = Field(default=None, gt=3)


class GridConfig(_Section):
    d: int = Field(default=1, ge=1, le=3)
    n: int = Field(default=1024, ge=8)
    L: float = Field(default=32.0, gt=0)

    @model_validator(mode="after")
    def _power_of_two(self) -> "GridConfig":
        if self.n & (self.n - 1):
            raise ValueError(f"'n' must be a power of two, got {self.n}")
        return self


class ModeConfig(_Section):
    """A real Fourier mode amplitude * cos(2 pi k.x / L + phase) * exp(-decay t)."""

    index: list[int]
    amplitude: float = 1.0
    phase: float = 0.0
    decay: float = 0.0


class ProblemConfig(_Section):
    lam: float = Field(default=0.0, ge=0, alias="lambda")
    T: float = Field(default=1.0, gt=0)
    s: float = 0.0
    p: float = Field(default=2.0, gt=1)
    q: float = Field(default=2.0, gt=1)
    N: int = Field(default=2, ge=2)
    m: Optional[int] = Field(default=None, ge=1)
    n_steps: int = Field(default=50, ge=1)
    initial: list[ModeConfig] = Field(default_factory=lambda: [ModeConfig(index=[1])])
    source: list[ModeConfig] = Field(default_factory=list)


class RunConfig(_Section):
    tasks: list[TaskName] = Field(default_factory=list)
    seed: int = Field(default=0, ge=0)
    threads: int = Field(default=1, ge=1)
    paths: int = Field(default=100_000, ge=1)
    t_values: list[float] = Field(default_factory=lambda: [1.0])
    probes: list[list[float]] = Field(default_factory=list)
    jump_cut: Optional[float] = Field(default=None, gt=0)
    criteria: list[int] = Field(default_factory=lambda: list(ACCEPTANCE_CRITERIA))
    corpus_size: int = Field(default=20, ge=2)
    mass_tolerance: float = Field(default=1e-8, gt=0)
    oracle_tolerance: float = Field(default=1e-4, gt=0)
    standard_errors: float = Field(default=3.0, gt=0)

    @model_validator(mode="after")
    def _ranges(self) -> "RunConfig":
        if any(t <= 0 for t in self.t_values):
            raise ValueError("'t_values' must be positive")
        unknown = sorted(set(self.criteria) - set(ACCEPTANCE_CRITERIA))
        if unknown:
            raise ValueError(f"unknown acceptance criteria {unknown}")
        return self


class OutputConfig(_Section):
    out_dir: str = "results"


class ExperimentConfig(_Section):
    """Root of an experiment configuration."""

    pi: MeasureConfig
    mu: Optional[MeasureConfig] = None
    mu0: Optional[MeasureConfig] = None
    scaling: ScalingConfig = Field(default_factory=ScalingConfig)
    assumptions: AssumptionConfig = Field(default_factory=AssumptionConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    problem: ProblemConfig = Field(default_factory=ProblemConfig)
    run: RunConfig = Field(default_factory=RunConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _probe_dimension(self) -> "ExperimentConfig":
        for i, probe in enumerate(self.run.probes):
            if len(probe) != self.grid.d:
                raise ValueError(
                    f"run.probes[{i}] has {len(probe)} coordinates, "
                    f"the grid has d={self.grid.d}"
                )
        return self


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "\n".join(lines)


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    """
    Validate a configuration mapping.

    Args:
        data: Decoded TOML/JSON document

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigParseError: With one "dotted.path: message" line per problem
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigParseError(_format_validation_error(e)) from e


def load_config(path: Path) -> ExperimentConfig:
    """
    Read and validate a TOML or JSON configuration file.

    Args:
        path: File path; the suffix selects the decoder

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigParseError: If the file is unreadable, undecodable or invalid
    """
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigParseError(f"cannot read {path}: {e}") from e

    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
        raise ConfigParseError(f"cannot decode {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigParseError(f"{path}: top level must be a table/object")
    return parse_config(data)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form of the configuration."""
    canonical = json.dumps(
        config.model_dump(mode="json", by_alias=True),
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def with_overrides(
    config: ExperimentConfig,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    out_dir: Optional[str] = None,
    run_updates: Optional[dict[str, Any]] = None,
) -> ExperimentConfig:
    """
    Apply command-line overrides to a validated configuration.

    The merged document is validated again, so overrides obey the same
    schema as the file.

    Raises:
        ConfigParseError: If an override breaks the schema
    """
    run_update: dict[str, Any] = dict(run_updates or {})
    if seed is not None:
        run_update["seed"] = seed
    if threads is not None:
        run_update["threads"] = threads
    if not run_update and out_dir is None:
        return config
    data = config.model_dump(by_alias=True)
    data["run"].update(run_update)
    if out_dir is not None:
        data["output"]["out_dir"] = out_dir
    return parse_config(data)
