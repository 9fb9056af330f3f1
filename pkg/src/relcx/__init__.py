"""Exact integer engine for relative-correspondence complexes over finite models."""
__version__ = "0.1.0"
