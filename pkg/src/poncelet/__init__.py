"""Periodic billiard trajectories in ellipses: Cayley conditions, Pell equations and extremal polynomials."""

from .conics import CausticKind, ConfocalFamily, interval_config
from .cayley import Flavor, closed_form_caustics, find_caustics
from .billiard import launch_tangent, simulate
from .pell import alternance, factor_pell, pell_pair
from .rotation import rotation_number

__all__ = [
    "CausticKind", "ConfocalFamily", "interval_config",
    "Flavor", "closed_form_caustics", "find_caustics",
    "launch_tangent", "simulate",
    "alternance", "factor_pell", "pell_pair",
    "rotation_number",
]
