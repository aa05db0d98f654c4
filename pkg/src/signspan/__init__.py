"""Exact and Monte Carlo tools for spans of random sign vectors."""

__version__ = "0.1.0"
