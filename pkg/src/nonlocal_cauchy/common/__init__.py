"""Shared plumbing: grids, quadrature, configuration and reports."""
