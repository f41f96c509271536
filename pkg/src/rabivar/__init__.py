"""Variational and benchmark solvers for the quantum Rabi model."""

__version__ = "0.1.0"
