"""Trigonometric kernels, λ-energies, invariants and variational solvers
for polyhedral surfaces and hyperbolic surfaces with geodesic boundary."""

__version__ = "0.1.0"
