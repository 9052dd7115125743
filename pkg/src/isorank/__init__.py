"""Exact verification of the K_0 rank identity ``l_g = r_g = g * 4**(g-1)`` and
finite-field counts of isotropic subspaces for a pencil of diagonal quadrics."""

__version__ = "0.1.0"
