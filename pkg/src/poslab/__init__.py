"""Certified positivity classification for structured kernel matrices."""

__version__ = "0.1.0"
