"""Structural-tragedy analysis for N-player binary-choice games."""

__version__ = "0.1.0"
