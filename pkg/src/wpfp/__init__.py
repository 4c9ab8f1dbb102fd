"""Wigner-Poisson-Fokker-Planck phase-space solver and estimate checks."""

__version__ = "0.1.0"
