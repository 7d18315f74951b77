"""Passive thermochemical heating of a small spherical sensor probe."""

__version__ = "0.1.0"
