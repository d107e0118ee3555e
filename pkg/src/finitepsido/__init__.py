"""Kohn-Nirenberg calculus and the Sjostrand class on finite abelian groups."""

__version__ = "0.1.0"

from .group import (Group, Lattice, PhasePoint, DualPhasePoint, Subgroup, Weight,  # noqa: E402
                    constant_weight, polynomial_weight, subexponential_weight)
from .transforms import Signal, PhaseFunction, fourier, inverse_fourier, stft, rihaczek  # noqa: E402
from .psido import Symbol, SpreadingFunction, kn_apply, kn_matrix, compose_symbols  # noqa: E402
from .gabor import GaborSystem, frame_bounds, tight_window  # noqa: E402
from .sjostrand import sjostrand_norm, gabor_matrix, cv_norm, wiener_experiment  # noqa: E402

__all__ = [
    "Group", "Lattice", "PhasePoint", "DualPhasePoint", "Subgroup", "Weight",
    "constant_weight", "polynomial_weight", "subexponential_weight",
    "Signal", "PhaseFunction", "fourier", "inverse_fourier", "stft", "rihaczek",
    "Symbol", "SpreadingFunction", "kn_apply", "kn_matrix", "compose_symbols",
    "GaborSystem", "frame_bounds", "tight_window",
    "sjostrand_norm", "gabor_matrix", "cv_norm", "wiener_experiment",
]
