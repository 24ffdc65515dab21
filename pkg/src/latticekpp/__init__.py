"""Numerics for pulled Fisher-KPP fronts on the integer lattice.

The package computes the minimal-speed dispersion pair, temporal and
spatial Green's functions of the comoving linearization together with
their refined Gaussian asymptotics, level-set delay fits, front-profile
collapse, explicit super/subsolution machinery, and a continuous-space
companion. Everything is exposed both as a library and through the
``latticekpp`` command line tool.
"""

__version__ = "0.1.0"

from .dispersion import Dispersion, solve_dispersion

__all__ = ["Dispersion", "solve_dispersion", "__version__"]
