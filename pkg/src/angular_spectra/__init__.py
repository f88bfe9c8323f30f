"""Outer angular spectra of linear nonautonomous difference equations."""

__version__ = "0.1.0"

from .grassmann import Subspace, orthonormalize, principal_angles, max_angle, grassmann_distance, span
from .system import SystemSpec, propagate, alpha, alpha_window, perturb_l1

__all__ = [
    "Subspace",
    "orthonormalize",
    "principal_angles",
    "max_angle",
    "grassmann_distance",
    "span",
    "SystemSpec",
    "propagate",
    "alpha",
    "alpha_window",
    "perturb_l1",
]
