"""Separability of pencils of conics, Kowalevski-type systems and two-valued groups."""

__version__ = "0.1.0"
