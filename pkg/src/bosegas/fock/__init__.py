"""Exact diagonalization of bosons in a truncated set of box momenta."""
