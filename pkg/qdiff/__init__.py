"""Quantum diffusion on a tight-binding lattice with temporally correlated on-site noise."""
