"""Numerical laboratory for global attractors of nonlinear Hamiltonian wave equations."""

__version__ = "0.1.0"
