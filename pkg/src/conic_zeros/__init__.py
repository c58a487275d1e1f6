"""Zeros of isotropic integral ternary quadratic forms: class decomposition and counting."""

__version__ = "0.1.0"
