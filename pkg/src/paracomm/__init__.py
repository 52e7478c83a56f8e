"""Numerical harness for commutators of Hilbert transforms along curves."""

__version__ = "0.1.0"
