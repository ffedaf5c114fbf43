"""Kinetic Monte Carlo for lattice contour dynamics, with pole and continuum oracles."""

__version__ = "0.1.0"
