"""Quantum and classical transport on Sierpinski fractals and regular lattices."""

__version__ = "0.1.0"
