"""Quantum reflection on Casimir-Polder wells and their Liouville-equivalent walls."""

__version__ = "0.1.0"
