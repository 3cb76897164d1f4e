"""Certified checks of topological necessary conditions for feedback stabilizability."""

__version__ = "0.1.0"
