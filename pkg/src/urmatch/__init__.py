"""Uniquely restricted matchings: verification, exact oracles, approximation
algorithms for bipartite graphs and uniquely restricted edge colourings."""

__version__ = "0.1.0"
