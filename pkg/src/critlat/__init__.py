"""Exact finite-volume computations for critical planar lattice models:
random-cluster measures, random currents, loop and parafermionic observables,
self-avoiding walks on the hexagonal lattice, and the six-vertex model."""

__version__ = "0.1.0"
