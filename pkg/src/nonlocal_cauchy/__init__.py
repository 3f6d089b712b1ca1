"""Spectral and Monte Carlo tools for Levy-driven parabolic Cauchy problems."""

__version__ = "0.1.0"
