"""Command-line tools for running experiments and acceptance suites."""
