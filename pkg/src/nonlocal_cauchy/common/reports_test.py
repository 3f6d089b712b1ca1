"""Tests for reports module."""

import json
import math
from pathlib import Path

import numpy as np

from nonlocal_cauchy.common.reports import (
    CheckReport,
    NormReport,
    artifact_payload,
    to_jsonable,
    write_csv,
    write_json,
)


class TestToJsonable:
    """Test conversion of numerical values."""

    def test_non_finite(self) -> None:
        """Test that infinities and NaN become strings."""
        converted = to_jsonable([math.inf, -math.inf, math.nan, 1.5])

        assert converted == ["inf", "-inf", "nan", 1.5]

    def test_numpy_values(self) -> None:
        """Test numpy scalars, arrays and booleans."""
        converted = to_jsonable(
            {"a": np.float64(2.0), "b": np.arange(3), "c": np.bool_(True)}
        )

        assert converted == {"a": 2.0, "b": [0, 1, 2], "c": True}
        assert isinstance(converted["c"], bool)

    def test_complex(self) -> None:
        """Test that complex numbers split into real and imaginary parts."""
        assert to_jsonable(1.0 - 2.0j) == {"re": 1.0, "im": -2.0}


class TestCheckReport:
    """Test check report serialization."""

    def test_pass_key(self) -> None:
        """Test the verdict key and the omission of empty optional fields."""
        report = CheckReport("h40", 0.5, math.inf, True)

        payload = report.to_dict()

        assert payload == {
            "name": "h40",
            "value": 0.5,
            "bound": "inf",
            "pass": True,
            "worst_point": None,
        }

    def test_details_and_diagnostic(self) -> None:
        """Test that details and the diagnostic are carried over."""
        report = CheckReport(
            "al1",
            2.0,
            1.0,
            False,
            worst_point=[0.5],
            details={"k": 3},
            diagnostic="bound exceeded",
        )

        payload = report.to_dict()

        assert payload["details"] == {"k": 3}
        assert payload["diagnostic"] == "bound exceeded"
        assert payload["worst_point"] == [0.5]


class TestNormReport:
    """Test norm report serialization."""

    def test_flags_omitted(self) -> None:
        """Test that an empty flag list is not written."""
        report = NormReport("besov", 1.25, {"p": 2.0}, [1.0, 0.25])

        payload = report.to_dict()

        assert "flags" not in payload
        assert payload["block_contributions"] == [1.0, 0.25]

    def test_flags_written(self) -> None:
        """Test that flags appear when present."""
        report = NormReport("triebel", math.inf, flags=["divergent"])

        payload = report.to_dict()

        assert payload["flags"] == ["divergent"]
        assert payload["value"] == "inf"


class TestArtifacts:
    """Test artifact payloads and files."""

    def test_payload_verdict(self) -> None:
        """Test that one failed report fails the artifact."""
        reports = [
            CheckReport("al1", 0.1, 1.0, True),
            CheckReport("al2", 2.0, 1.0, False),
        ]

        payload = artifact_payload("audit", "abc", reports, {"n": 3})

        assert payload["pass"] is False
        assert payload["config_hash"] == "abc"
        assert payload["data"] == {"n": 3}
        assert set(payload["versions"]) == {"nonlocal_cauchy", "numpy", "scipy"}

    def test_payload_without_reports(self) -> None:
        """Test that an artifact without reports passes and has no data key."""
        payload = artifact_payload("symbol", "abc", [])

        assert payload["pass"] is True
        assert "data" not in payload

    def test_write_json_sorted(self, tmp_path: Path) -> None:
        """Test sorted keys and a trailing newline."""
        path = write_json(tmp_path / "nested" / "report.json", {"b": 1, "a": 2})

        text = path.read_text(encoding="utf-8")

        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")
        assert json.loads(text) == {"a": 2, "b": 1}

    def test_write_csv(self, tmp_path: Path) -> None:
        """Test the header row and round-trip float formatting."""
        path = write_csv(
            tmp_path / "table.csv", ["x", "y"], [[0.1, 1], [1.0 / 3.0, 2]]
        )

        lines = path.read_text(encoding="utf-8").splitlines()

        assert lines[0] == "x,y"
        assert lines[1] == "0.1,1"
        assert float(lines[2].split(",")[0]) == 1.0 / 3.0
