"""Exact residue symbols and topological indices at complete intersection germs."""

__version__ = "0.1.0"
