"""Tests for utils module."""

from nonlocal_cauchy.common.utils import format_duration, format_timestamp


class TestFormatTimestamp:
    """Test ISO 8601 formatting of run timestamps."""

    def test_epoch(self) -> None:
        """Test the Unix epoch itself."""
        assert format_timestamp(0.0) == "1970-01-01T00:00:00.000Z"

    def test_milliseconds_are_kept(self) -> None:
        """Test that fractional seconds show up as milliseconds."""
        result = format_timestamp(1577836800.25)

        assert result == "2020-01-01T00:00:00.250Z"


class TestFormatDuration:
    """Test human-readable durations."""

    def test_sub_second(self) -> None:
        """Test a duration shorter than one second."""
        assert format_duration(0.5) == "00:00:00.500"

    def test_minutes_and_hours(self) -> None:
        """Test a duration spanning hours and minutes."""
        assert format_duration(3723.25) == "01:02:03.250"

    def test_single_day(self) -> None:
        """Test singular day wording."""
        assert format_duration(86400 + 1.0) == "1 day, 00:00:01.000"

    def test_multiple_days(self) -> None:
        """Test plural day wording."""
        assert format_duration(2 * 86400) == "2 days, 00:00:00.000"

    def test_negative_uses_magnitude(self) -> None:
        """Test that the sign is dropped."""
        assert format_duration(-1.5) == "00:00:01.500"
