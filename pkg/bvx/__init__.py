"""Prioritized graph Voronoi diagrams and Balanced Vertex solvers."""

__version__ = "0.1.0"
