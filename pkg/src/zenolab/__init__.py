"""Numerical laboratory for quantum Zeno dynamics in finite spin chains."""

__version__ = "0.1.0"
