"""Spectral toolkit for periodic Zakharov-Shabat operators."""

__version__ = "0.1.0"
