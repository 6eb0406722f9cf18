"""Numerical toolkit for the hypergeometric-to-Whittaker limit transition.

Modules
-------
rootsystem  root data, Weyl groups and lattice enumeration
specfun     complex log-Gamma, Gamma ratios, 2F1 and K_nu
series      Harish-Chandra, Calogero-Moser and Toda series
factors     c-functions, f, the intertwiner M and the scaling data
assemble    Weyl sums, limit sweeps and finite-difference Hamiltonians
cli         command-line front end
"""

from .errors import (
    AccuracyError,
    ConfigurationError,
    DegenerateCharacterError,
    DomainError,
    NumericalError,
    PoleError,
    ResonanceError,
    ZeroByPole,
)
from .rootsystem import RootSystem, build_root_system

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "ConfigurationError", "DegenerateCharacterError", "DomainError",
    "NumericalError", "PoleError", "ResonanceError", "RootSystem", "ZeroByPole",
    "build_root_system",
]
