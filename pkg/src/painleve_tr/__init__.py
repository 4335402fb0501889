"""Topological recursion and determinantal formulas for the Painleve equations."""

__version__ = "0.1.0"
