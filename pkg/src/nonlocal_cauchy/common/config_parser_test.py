"""Tests for config_parser module."""

import json
from pathlib import Path

import pytest

from nonlocal_cauchy.common.config_parser import (
    ConfigParseError,
    config_hash,
    load_config,
    parse_config,
    with_overrides,
)
from nonlocal_cauchy.common.errors import ConfigError

MINIMAL = {"pi": {"kind": "stable", "sigma": 1.0}}


class TestParseConfig:
    """Test schema validation."""

    def test_minimal(self) -> None:
        """Test that defaults fill every optional section."""
        config = parse_config(MINIMAL)

        assert config.pi.sigma == 1.0
        assert config.mu is None
        assert config.grid.n == 1024
        assert config.problem.lam == 0.0
        assert config.run.t_values == [1.0]
        assert config.run.criteria == list(range(1, 12))
        assert config.output.out_dir == "results"

    def test_unknown_key(self) -> None:
        """Test that misspelled keys are rejected."""
        with pytest.raises(ConfigParseError, match="sigmaa"):
            parse_config({"pi": {"kind": "stable", "sigma": 1.0, "sigmaa": 1.0}})

    def test_dotted_path(self) -> None:
        """Test that messages carry the dotted field path."""
        with pytest.raises(ConfigParseError, match="problem.T"):
            parse_config({**MINIMAL, "problem": {"T": -1.0}})

    def test_stable_needs_sigma(self) -> None:
        """Test the per-kind required fields."""
        with pytest.raises(ConfigParseError, match="sigma"):
            parse_config({"pi": {"kind": "stable"}})

    def test_grid_power_of_two(self) -> None:
        """Test that grid sizes must be powers of two."""
        with pytest.raises(ConfigParseError, match="power of two"):
            parse_config({**MINIMAL, "grid": {"n": 100}})

    def test_lambda_alias(self) -> None:
        """Test that the problem section accepts the 'lambda' key."""
        config = parse_config({**MINIMAL, "problem": {"lambda": 0.5}})

        assert config.problem.lam == 0.5

    def test_unknown_criterion(self) -> None:
        """Test that acceptance criteria are 1..11."""
        with pytest.raises(ConfigParseError, match="criteria"):
            parse_config({**MINIMAL, "run": {"criteria": [3, 12]}})

    def test_bernstein_catalog(self) -> None:
        """Test that catalog items check their parameters."""
        with pytest.raises(ConfigParseError, match="'alpha' and 'beta'"):
            parse_config({"pi": {"kind": "bernstein", "phi": {"catalog": 1}}})

    def test_cylinder_constant(self) -> None:
        """Test that C0 is optional and must exceed 3."""
        config = parse_config({**MINIMAL, "assumptions": {"C0": 4.5}})

        assert config.assumptions.C0 == 4.5
        assert parse_config(MINIMAL).assumptions.C0 is None
        with pytest.raises(ConfigParseError, match="assumptions.C0"):
            parse_config({**MINIMAL, "assumptions": {"C0": 3.0}})

    def test_evaluation_point_dimension(self) -> None:
        """Test that every Feynman-Kac point has one coordinate per grid axis."""
        two_d = {**MINIMAL, "grid": {"d": 2, "n": 64}}

        config = parse_config({**two_d, "run": {"probes": [[0.0, 1.0]]}})

        assert config.run.probes == [[0.0, 1.0]]
        with pytest.raises(ConfigParseError, match=r"run.probes\[1\] has 1 coord"):
            parse_config({**two_d, "run": {"probes": [[0.0, 1.0], [2.0]]}})

    def test_error_hierarchy(self) -> None:
        """Test that parse errors are configuration errors."""
        assert issubclass(ConfigParseError, ConfigError)


class TestLoadConfig:
    """Test reading configuration files."""

    def test_toml(self, tmp_path: Path) -> None:
        """Test a TOML document."""
        path = tmp_path / "experiment.toml"
        path.write_text(
            '[pi]\nkind = "stable"\nsigma = 0.5\n\n[grid]\nn = 64\n', encoding="utf-8"
        )

        config = load_config(path)

        assert config.pi.sigma == 0.5
        assert config.grid.n == 64

    def test_json(self, tmp_path: Path) -> None:
        """Test a JSON document."""
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps(MINIMAL), encoding="utf-8")

        config = load_config(path)

        assert config.pi.kind == "stable"

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that unreadable files raise ConfigParseError."""
        with pytest.raises(ConfigParseError, match="cannot read"):
            load_config(tmp_path / "absent.toml")

    def test_undecodable(self, tmp_path: Path) -> None:
        """Test that malformed TOML raises ConfigParseError."""
        path = tmp_path / "broken.toml"
        path.write_text("[pi\nkind = ", encoding="utf-8")

        with pytest.raises(ConfigParseError, match="cannot decode"):
            load_config(path)

    def test_top_level_array(self, tmp_path: Path) -> None:
        """Test that a JSON array is not a configuration."""
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")

        with pytest.raises(ConfigParseError, match="top level"):
            load_config(path)


class TestConfigHash:
    """Test hashing and overrides."""

    def test_stable_hash(self) -> None:
        """Test that equal configurations hash equally."""
        first = config_hash(parse_config(MINIMAL))
        second = config_hash(parse_config(dict(MINIMAL)))

        assert first == second
        assert len(first) == 64

    def test_overrides_change_hash(self) -> None:
        """Test that the seed override reaches the hash."""
        config = parse_config(MINIMAL)

        seeded = with_overrides(config, seed=7, threads=2, out_dir="elsewhere")

        assert seeded.run.seed == 7
        assert seeded.run.threads == 2
        assert seeded.output.out_dir == "elsewhere"
        assert config_hash(seeded) != config_hash(config)

    def test_run_updates_are_validated(self) -> None:
        """Test that overrides pass through the schema again."""
        config = parse_config(MINIMAL)

        updated = with_overrides(config, run_updates={"paths": 50, "probes": [[1.5]]})

        assert updated.run.paths == 50
        assert updated.run.probes == [[1.5]]
        with pytest.raises(ConfigParseError, match="run.paths"):
            with_overrides(config, run_updates={"paths": 0})
        with pytest.raises(ConfigParseError, match="probes"):
            with_overrides(config, run_updates={"probes": [[0.0, 1.0]]})

    def test_no_overrides(self) -> None:
        """Test that an empty override returns the same object."""
        config = parse_config(MINIMAL)

        assert with_overrides(config) is config
