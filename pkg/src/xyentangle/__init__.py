"""Pairwise concurrence of the ferromagnetic isotropic XY chain in random and thermal fields."""

__version__ = "0.1.0"
