"""Exact finite-field laboratory for variation ranks of nodal plane curves."""

__version__ = "0.1.0"
