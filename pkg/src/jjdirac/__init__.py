"""Josephson-circuit simulation of a driven Dirac particle."""

__version__ = "0.1.0"
