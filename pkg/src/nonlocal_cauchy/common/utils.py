"""Utility functions for formatting run timestamps and durations."""

from datetime import datetime, timezone


def format_timestamp(timestamp_s: float) -> str:
    """
    Format a wall-clock timestamp as an ISO 8601 string.

    Args:
        timestamp_s: Seconds since Unix epoch (as returned by time.time())

    Returns:
        ISO 8601 formatted string (e.g., "2020-01-01T00:00:00.000Z")
    """
    dt = datetime.fromtimestamp(timestamp_s, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"


def format_duration(seconds: float) -> str:
    """
    Format an elapsed time as a human-readable string.

    Args:
        seconds: Elapsed time in seconds (negative values are shown by magnitude)

    Returns:
        Duration string such as "00:01:02.500" or "1 day, 02:00:00.000"
    """
    total = abs(seconds)
    days = int(total // 86400)
    remaining = total % 86400
    hours = int(remaining // 3600)
    remaining %= 3600
    minutes = int(remaining // 60)
    secs = remaining % 60

    clock = f"{hours:02d}:{minutes:02d}:{secs:06.3f}"
    if days > 0:
        return f"{days} day{'s' if days != 1 else ''}, {clock}"
    return clock
