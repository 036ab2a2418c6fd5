"""Weyl-Heisenberg group laws, Gabor analysis on the line and on the
cylinder, and positive quantization of time-frequency densities."""

__version__ = "0.1.0"
