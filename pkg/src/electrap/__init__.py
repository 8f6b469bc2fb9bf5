"""Simulation and design tools for parametric frequency conversion between
a trapped electron's motion and superconducting circuits."""

__version__ = "0.1.0"
