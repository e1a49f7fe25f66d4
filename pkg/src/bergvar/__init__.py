"""Weighted Bergman kernels on families of planar domains and their variations."""

__version__ = "0.1.0"
