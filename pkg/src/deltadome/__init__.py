"""Deltahedral domes over equiangular integer polygons."""

__version__ = "0.1.0"
