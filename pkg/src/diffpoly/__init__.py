"""Exact computation in iterated differential polynomial rings over finite algebras."""

__version__ = "0.1.0"
