"""Radial Poincare, Hardy and Rellich inequalities on hyperbolic space."""

__version__ = "0.1.0"
