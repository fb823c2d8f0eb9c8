"""Exact two-parameter Fock space on extended Young diagrams."""

__version__ = "0.1.0"
