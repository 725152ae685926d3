"""Distribution of the first hitting time of zero for two-sided stable processes."""

from .params import AlphaKind, Sign, StableParams, classify_alpha, make_params
from .mellin_law import mellin_T0
from .density_series import density
from .mellin_inversion import invert_density, survival
from .results import DensityResult, Method

__all__ = [
    "AlphaKind",
    "DensityResult",
    "Method",
    "Sign",
    "StableParams",
    "classify_alpha",
    "density",
    "invert_density",
    "make_params",
    "mellin_T0",
    "survival",
]
__version__ = "0.1.0"
