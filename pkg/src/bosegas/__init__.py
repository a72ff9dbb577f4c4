"""Numerical laboratory for the ground-state energy of dilute Bose gases."""
__version__ = "0.1.0"
