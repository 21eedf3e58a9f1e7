"""Exact analysis of rational matrix digit systems and self-affine tiles."""

__version__ = "0.1.0"
