"""Hermite-Hadamard inequality verification for operator geometrically convex functions."""

__version__ = "0.1.0"
