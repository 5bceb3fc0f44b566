"""Standalone runner for inline tests embedded in Python source files."""

__version__ = "0.1.0"
