"""Tests for acceptance module."""

import pytest

from nonlocal_cauchy.common.errors import ParameterError
from nonlocal_cauchy.common.reports import CheckReport
from nonlocal_cauchy.tools.acceptance import (
    CRITERIA,
    SuiteOptions,
    embedding_audits,
    estimate_family,
    run_criteria,
)


class TestRegistry:
    """Test criterion selection."""

    def test_all_criteria_registered(self) -> None:
        """Test that criteria 1 to 11 are available."""
        assert sorted(CRITERIA) == list(range(1, 12))

    def test_unknown_criterion(self) -> None:
        """Test that criterion 12 is refused before anything runs."""
        with pytest.raises(ParameterError, match="12"):
            run_criteria([12], SuiteOptions())


class TestCriteria:
    """Test reduced runs of the cheaper criteria."""

    def test_estimate_family(self) -> None:
        """Test the slice, space-time and a-priori reports on two problems."""
        reports = estimate_family(SuiteOptions(family_size=2))

        assert [r.name for r in reports] == ["h40", "h5", "t1"]
        assert all(r.passed for r in reports)
        assert len(reports[0].details["members"]) == 2

    def test_embedding(self) -> None:
        """Test both representations and the modulus reports."""
        reports = embedding_audits(SuiteOptions())

        assert [r.name for r in reports] == ["kl1", "kl1", "ccc1", "pro4"]
        assert reports[0].passed
        assert reports[1].passed

    def test_run_in_order(self) -> None:
        """Test that results are keyed by criterion and hold reports."""
        results = run_criteria([9], SuiteOptions())

        assert list(results) == [9]
        assert all(isinstance(r, CheckReport) for r in results[9])
