"""Numerical counterexamples to quasiconcavity for the heat equation on annuli."""

__version__ = "0.1.0"
