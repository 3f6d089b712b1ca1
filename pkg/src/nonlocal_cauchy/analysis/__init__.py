"""Numerical modules: measures, symbols, spaces, densities, Monte Carlo, solver."""
