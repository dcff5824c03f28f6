"""Finite-dimensional Krein-space spectral toolkit for Klein-Gordon operators."""

__version__ = "0.1.0"
