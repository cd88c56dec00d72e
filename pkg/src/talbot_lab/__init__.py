"""Numerical laboratory for quadratic exponential sums, periodic
Schrodinger revivals at rational times, and fractal-dimension machinery."""

__version__ = "0.1.0"
