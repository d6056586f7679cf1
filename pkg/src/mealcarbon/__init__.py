"""Cradle-to-gate carbon footprint estimation for composite meals."""

__version__ = "0.1.0"
