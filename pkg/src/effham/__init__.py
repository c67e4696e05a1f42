"""Effective Hamiltonians of nonconvex radial Hamiltonians on the torus."""

__version__ = "0.1.0"
