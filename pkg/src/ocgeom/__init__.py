"""Numerical octonionic contact geometry on the flat model."""

__version__ = "0.1.0"
