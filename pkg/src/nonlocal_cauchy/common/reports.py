"""Structured check and norm reports, and their JSON/CSV artifacts."""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np
import scipy

from nonlocal_cauchy import __version__


@dataclass
class CheckReport:
    """Outcome of one assumption, inequality or oracle audit."""

    name: str
    value: float
    bound: float
    passed: bool
    worst_point: Any = None
    details: dict[str, Any] = field(default_factory=dict)
    diagnostic: str = ""

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready dictionary with the ``pass`` verdict key."""
        payload: dict[str, Any] = {
            "name": self.name,
            "value": self.value,
            "bound": self.bound,
            "pass": self.passed,
            "worst_point": self.worst_point,
        }
        if self.details:
            payload["details"] = self.details
        if self.diagnostic:
            payload["diagnostic"] = self.diagnostic
        return to_jsonable(payload)


@dataclass
class NormReport:
    """A computed function-space norm with its per-block breakdown."""

    name: str
    value: float
    parameters: dict[str, Any] = field(default_factory=dict)
    block_contributions: list[float] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "name": self.name,
            "value": self.value,
            "parameters": self.parameters,
            "block_contributions": self.block_contributions,
        }
        if self.flags:
            payload["flags"] = self.flags
        return to_jsonable(payload)


def to_jsonable(obj: Any) -> Any:
    """
    Convert numpy scalars/arrays and non-finite floats into JSON-safe values.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    return obj


def artifact_payload(
    task: str,
    config_hash: str,
    reports: Iterable[CheckReport],
    extra: Optional[dict[str, Any]] = None,
) -> dict[str, Any]:
    """
    Deterministic artifact body for one task.

    Args:
        task: Task name
        config_hash: Hash of the experiment configuration
        reports: Check reports produced by the task
        extra: Additional task-specific data

    Returns:
        Dictionary ready for write_json
    """
    report_list = [r.to_dict() for r in reports]
    payload: dict[str, Any] = {
        "task": task,
        "config_hash": config_hash,
        "versions": {
            "nonlocal_cauchy": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "reports": report_list,
        "pass": all(r["pass"] for r in report_list),
    }
    if extra:
        payload["data"] = to_jsonable(extra)
    return payload


def write_json(path: Path, payload: Any) -> Path:
    """Write JSON with sorted keys so identical inputs give identical bytes."""
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(payload), sort_keys=True, indent=2)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def write_csv(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> Path:
    """Write a CSV file with a header row, floats in round-trip repr."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path
