"""
Smoothing X = Y + Z and its shift bounds.

Quick Start:
    >>> from hrdepth.smoothing import DensityFamily, SmoothingDensity, tv_shift_check
    >>> check = tv_shift_check(SmoothingDensity(family=DensityFamily.GAUSSIAN, scale=1.0), 0.1)
    >>> check.lhs <= check.rhs
    True
"""

from .models import (
    BracketWidthCheck,
    DensityFamily,
    MarginShiftCheck,
    PositivityFloor,
    SmoothingDensity,
    TVShiftCheck,
)
from .operations import (
    bracket_width_check,
    density_mass,
    grad_l1,
    grad_l1_quadrature,
    lower_margins,
    margin_shift_check,
    positivity_floor,
    smooth_ensemble,
    tv_shift_check,
)

__all__ = [
    "DensityFamily",
    "SmoothingDensity",
    "TVShiftCheck",
    "MarginShiftCheck",
    "BracketWidthCheck",
    "PositivityFloor",
    "smooth_ensemble",
    "grad_l1",
    "grad_l1_quadrature",
    "density_mass",
    "tv_shift_check",
    "margin_shift_check",
    "bracket_width_check",
    "positivity_floor",
    "lower_margins",
]
